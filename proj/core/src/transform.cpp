#include "sblkit/transform.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace sblkit {

// The algorithms consume only r = U^T y, Phi = L V = U^T A, and the squared
// singular values, so the left factor is taken from the symmetric
// eigendecomposition of A A^T instead of a direct SVD; this is roughly twice
// as fast at the experiment sizes. U is orthonormal to machine precision,
// which is what the downstream identities (norm preservation, Phi^T Phi =
// A^T A) rely on; singular values below ~1e-8 of the largest lose relative
// accuracy to the squaring, and nothing here reads them at that resolution.
TransformedModel unitary_transform(const Matrix& a, const Vector& y) {
  if (a.rows() != y.size())
    throw std::invalid_argument("unitary_transform: dimension mismatch");
  if (!a.allFinite() || !y.allFinite())
    throw NumericError("unitary_transform: non-finite input");
  if (a.isZero(0.0))
    throw std::invalid_argument("unitary_transform: A must be nonzero");

  const Index m = a.rows(), n = a.cols();
  const int mi = int(m), ni = int(n);

  Matrix gram(m, m);
  cblas_dsyrk(CblasColMajor, CblasLower, CblasNoTrans, mi, ni, 1.0, a.data(), mi,
              0.0, gram.data(), mi);
  Vector eig(m);
  const int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', mi, gram.data(), mi, eig.data());
  if (info != 0)
    throw NumericError("unitary_transform: eigendecomposition failed");
  // gram now holds the eigenvectors, eigenvalues ascending; flip to the
  // descending singular-value convention.
  Matrix u(m, m);
  for (Index i = 0; i < m; ++i) u.col(i) = gram.col(m - 1 - i);

#ifndef NDEBUG
  assert((u.transpose() * u - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10);
#endif

  TransformedModel tm;
  tm.m = m;
  tm.n = n;
  tm.r = u.transpose() * y;
  tm.phi.resize(m, n);
  cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, mi, ni, mi, 1.0, u.data(),
              mi, a.data(), mi, 0.0, tm.phi.data(), mi);
  tm.lambda_p = Vector::Zero(m);
  const Index k = std::min(m, n);
  for (Index i = 0; i < k; ++i) tm.lambda_p[i] = std::max(eig[m - 1 - i], 0.0);
  // Rows past min(m, n) are exact zeros of L V; stamp out the round-off.
  for (Index i = k; i < m; ++i) tm.phi.row(i).setZero();
  return tm;
}

}  // namespace sblkit

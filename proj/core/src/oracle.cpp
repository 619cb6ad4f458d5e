#include "sblkit/oracle.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

#include "sblkit/problem.hpp"

namespace sblkit {

OracleResult oracle_mmse(const Matrix& a, const Vector& y,
                         const std::vector<Index>& support, double lambda_true,
                         double sigma2_x, const Vector* truth) {
  if (a.rows() != y.size())
    throw std::invalid_argument("oracle_mmse: dimension mismatch");
  if (!(lambda_true > 0.0) || !(sigma2_x > 0.0))
    throw std::invalid_argument("oracle_mmse: precisions must be positive");

  OracleResult res;
  res.x_hat_oracle = Vector::Zero(a.cols());

  const Index k = Index(support.size());
  if (k > 0) {
    Matrix as(a.rows(), k);
    for (Index j = 0; j < k; ++j) {
      if (support[size_t(j)] < 0 || support[size_t(j)] >= a.cols())
        throw std::invalid_argument("oracle_mmse: support index out of range");
      as.col(j) = a.col(support[size_t(j)]);
    }

    Matrix gram = as.transpose() * as;
    Vector rhs = as.transpose() * y;
    if (std::isinf(lambda_true)) {
      // Noiseless limit: the ridge term vanishes.
    } else {
      gram.diagonal().array() += 1.0 / (sigma2_x * lambda_true);
    }
    Eigen::LDLT<Matrix> ldlt(gram);
    Vector xs = ldlt.solve(rhs);

    const double resid = (gram * xs - rhs).norm();
    const double scale = rhs.norm() + gram.norm();
    if (!xs.allFinite() || resid > 1e-8 * std::max(scale, 1.0))
      throw NumericError("oracle_mmse: solver residual check failed");

    for (Index j = 0; j < k; ++j) res.x_hat_oracle[support[size_t(j)]] = xs[j];
  }

  if (truth != nullptr) res.nmse_db = nmse_db(res.x_hat_oracle, *truth);
  return res;
}

}  // namespace sblkit

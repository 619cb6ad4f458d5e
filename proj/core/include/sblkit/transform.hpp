#pragma once

#include "sblkit/types.hpp"

namespace sblkit {

/// The model after left-multiplication by U^T, where A = U L V (full SVD):
/// r = U^T y = Phi x + transformed noise, Phi = L V.
/// The transformed noise keeps the covariance lambda^{-1} I.
struct TransformedModel {
  Vector r;         // length m
  Matrix phi;       // m x n
  Vector lambda_p;  // diag(L L^T): squared singular values, zero-padded to m
  Index m = 0;
  Index n = 0;
};

/// Computes the full SVD of A and returns the transformed system UTAMP and
/// UTAMP-SBL consume. Any valid SVD is acceptable; sign and ordering
/// conventions of the factors do not affect the algorithms.
TransformedModel unitary_transform(const Matrix& a, const Vector& y);

}  // namespace sblkit

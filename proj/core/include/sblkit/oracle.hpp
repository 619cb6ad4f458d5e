#pragma once

#include <vector>

#include "sblkit/types.hpp"

namespace sblkit {

struct OracleResult {
  Vector x_hat_oracle;  // zeros off the given support
  double nmse_db = kNaN;  // filled when truth is supplied
};

/// Genie-aided LMMSE estimator that knows the true support: restricted to the
/// support columns A_S it solves
///   (lambda A_S^T A_S + sigma2_x^{-1} I) x_S = lambda A_S^T y,
/// and is zero elsewhere. lambda_true = +inf yields the least-squares limit.
/// Uses the true noise precision and slab variance; this is a bound, not an
/// estimator of them.
OracleResult oracle_mmse(const Matrix& a, const Vector& y,
                         const std::vector<Index>& support, double lambda_true,
                         double sigma2_x, const Vector* truth = nullptr);

}  // namespace sblkit

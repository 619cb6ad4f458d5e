#pragma once

#include "sblkit/denoise.hpp"
#include "sblkit/types.hpp"

namespace sblkit {

struct AmpOptions {
  int max_iter = 300;
  double tol = 1e-10;       // relative squared change of x_hat
  double damping = 1.0;     // in (0, 1]; applied to x_hat and s
  double tau_x_init = 1.0;
  // When false the loop keeps running after divergence is detected, which is
  // only useful for timing the baseline at a fixed iteration budget.
  bool halt_on_divergence = true;
};

/// Vector-stepsize AMP with known noise precision `lambda`. Divergence (state
/// norm above 1e12 or non-finite) is flagged in the result, never thrown:
/// this solver is the divergence-prone baseline and its failures are data.
RunResult amp_run(const Matrix& a, const Vector& y, const DenoiserSpec& denoiser,
                  double lambda, const AmpOptions& opts = {},
                  const Vector* truth = nullptr);

}  // namespace sblkit

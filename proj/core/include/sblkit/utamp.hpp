#pragma once

#include "sblkit/denoise.hpp"
#include "sblkit/transform.hpp"
#include "sblkit/types.hpp"

namespace sblkit {

struct UtampOptions {
  int max_iter = 300;
  double tol = 1e-10;  // relative squared change of x_hat
  double tau_x_init = 1.0;
};

/// UTAMP with known noise precision: the vector-stepsize AMP applied to the
/// transformed model, with scalar-averaged variances. Throws NumericError
/// (carrying the iteration index) if the state goes non-finite.
RunResult utamp_run(const TransformedModel& tm, const DenoiserSpec& denoiser,
                    double lambda, const UtampOptions& opts = {},
                    const Vector* truth = nullptr);

}  // namespace sblkit

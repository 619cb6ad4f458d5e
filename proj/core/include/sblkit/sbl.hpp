#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sblkit/transform.hpp"
#include "sblkit/types.hpp"

namespace sblkit {

struct SblConfig {
  int max_iter = 300;
  double tol = 1e-10;        // delta_x: relative squared change of x_hat
  double eps_init = 0.001;
  double gamma_init = 1.0;
  double lambda_init = 1.0;
  double tau_x_init = 1.0;

  enum class EpsUpdate { kClosedForm, kNewton };
  EpsUpdate eps_update = EpsUpdate::kClosedForm;

  // Rate parameter of the Gamma hyperprior; fixed at 0 in all experiments.
  double eta = 0.0;

  // Known-noise variant: freezes lambda_hat at this value and skips the
  // noise-learning lines, leaving the rest of the loop untouched.
  std::optional<double> fixed_lambda;
};

/// Mutable per-iteration state of the UTAMP-SBL loop.
struct SblState {
  Vector x_hat;
  double tau_x = 1.0;
  Vector s;
  Vector gamma_hat;
  double lambda_hat = 1.0;
  double eps_hat = 0.001;
  Vector h_hat;
  Vector v_h;
  int t = 0;
};

/// Per-iteration trace row, written by the CLI as CSV.
struct SblTraceRow {
  int t;
  double nmse_db;  // NaN when no truth was supplied
  double lambda_hat;
  double eps_hat;
  double tau_x;
};

/// Test hook: called after each completed iteration with the state and the
/// iteration's variance vectors.
using SblObserver = std::function<void(const SblState& state, const Vector& tau_p,
                                       const Vector& tau_s, double tau_q)>;

// Clamps keeping the learned precisions inside floating-point-safe ranges.
inline constexpr double kLambdaHatMin = 1e-12;
inline constexpr double kLambdaHatMax = 1e12;
inline constexpr double kGammaHatMax = 1e11;

/// Noise-precision update: lambda_hat = m / (||r - h_hat||^2 + sum(v_h)),
/// clamped to [kLambdaHatMin, kLambdaHatMax].
double update_noise_precision(const Vector& r, const Vector& h_hat, const Vector& v_h);

/// Precision update: gamma_n = (2 eps + 1) / (2 eta + |x_n|^2 + tau_x),
/// clamped above at kGammaHatMax. (For complex data the numerator would be
/// eps + 1; only real arithmetic is implemented.)
Vector update_gamma(const Vector& x_hat, double tau_x, double eps_hat, double eta = 0.0);

/// Closed-form shape update: eps = sqrt(log(mean g) - mean(log g)) / 2.
/// The radicand is the Jensen gap and is clipped at 0 against round-off.
double update_epsilon_closed(const Vector& gamma_hat);

/// One step of the digamma fixed-point iteration for the shape parameter.
/// Falls back to the closed form (with a warning) when the curvature term
/// 1/eps - trigamma(eps) loses its sign numerically.
double update_epsilon_newton(const Vector& gamma_hat, double eps_current);

/// UTAMP-SBL: joint recovery of x, the per-element precisions, the noise
/// precision, and the hyperprior shape. Throws NumericError on non-finite
/// state; a degenerate r = 0 returns the zero estimate with a warning.
RunResult sbl_run(const TransformedModel& tm, const SblConfig& cfg = {},
                  const Vector* truth = nullptr,
                  std::vector<SblTraceRow>* trace = nullptr,
                  const SblObserver& observer = nullptr);

}  // namespace sblkit

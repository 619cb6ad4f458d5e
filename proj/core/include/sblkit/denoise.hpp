#pragma once

#include <variant>

#include "sblkit/types.hpp"

namespace sblkit {

/// Spike-and-slab prior: zero w.p. 1-rho, N(0, sigma2_x) otherwise.
struct BernoulliGaussianPrior {
  double rho = 0.1;
  double sigma2_x = 1.0;
};

/// Fixed zero-mean Gaussian prior with per-element precisions gamma.
struct GaussianPrior {
  Vector gamma;
};

using DenoiserSpec = std::variant<BernoulliGaussianPrior, GaussianPrior>;

/// Posterior mean and variance of x given the pseudo-observation
/// q = x + N(0, tau_q). tau_post = tau_q * g_x' elementwise, so the
/// denoiser derivative is recovered as tau_post / tau_q.
struct Denoised {
  Vector x_hat;
  Vector tau_post;
};

// Scalar tau_q is the UTAMP path, vector tau_q the vector-stepsize AMP path;
// semantics are identical elementwise.
Denoised bg_denoise(const Vector& q, double tau_q, double rho, double sigma2_x);
Denoised bg_denoise(const Vector& q, const Vector& tau_q, double rho, double sigma2_x);
Denoised gaussian_denoise(const Vector& q, double tau_q, const Vector& gamma);
Denoised gaussian_denoise(const Vector& q, const Vector& tau_q, const Vector& gamma);

Denoised denoise(const DenoiserSpec& spec, const Vector& q, double tau_q);
Denoised denoise(const DenoiserSpec& spec, const Vector& q, const Vector& tau_q);

}  // namespace sblkit

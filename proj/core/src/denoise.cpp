#include "sblkit/denoise.hpp"

#include <cmath>
#include <stdexcept>

namespace sblkit {

namespace {

double stable_sigmoid(double l) {
  if (l >= 0.0) return 1.0 / (1.0 + std::exp(-l));
  const double e = std::exp(l);
  return e / (1.0 + e);
}

// Posterior mean/variance of one element under the spike-and-slab prior.
//
// The spike/slab weights are combined in the log-odds domain: the evidence
// ratio N(q|0, s2+tau)/N(q|0, tau) overflows in its naive form once
// q^2/tau is a few hundred, while the log-odds stays representable.
inline void bg_element(double q, double tau, double rho, double s2,
                       double& x_hat, double& tau_post) {
  if (rho <= 0.0) {
    x_hat = 0.0;
    tau_post = 0.0;
    return;
  }
  const double slab_mean = q * s2 / (s2 + tau);
  const double slab_var = s2 * tau / (s2 + tau);
  double pi = 1.0;
  if (rho < 1.0) {
    const double log_odds = std::log(rho / (1.0 - rho)) +
                            0.5 * std::log(tau / (s2 + tau)) +
                            q * q * s2 / (2.0 * tau * (s2 + tau));
    pi = stable_sigmoid(log_odds);
  }
  x_hat = pi * slab_mean;
  tau_post = pi * slab_var + pi * (1.0 - pi) * slab_mean * slab_mean;
}

void check_q(const Vector& q) {
  if (!q.allFinite()) throw NumericError("denoise: non-finite pseudo-observation");
}

void check_bg(double rho, double sigma2_x) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("bg_denoise: rho must lie in [0, 1]");
  if (!(sigma2_x > 0.0))
    throw std::invalid_argument("bg_denoise: sigma2_x must be positive");
}

}  // namespace

Denoised bg_denoise(const Vector& q, double tau_q, double rho, double sigma2_x) {
  check_q(q);
  check_bg(rho, sigma2_x);
  if (!(tau_q > 0.0)) throw std::invalid_argument("bg_denoise: tau_q must be positive");
  Denoised out{Vector(q.size()), Vector(q.size())};
  for (Index i = 0; i < q.size(); ++i)
    bg_element(q[i], tau_q, rho, sigma2_x, out.x_hat[i], out.tau_post[i]);
  return out;
}

Denoised bg_denoise(const Vector& q, const Vector& tau_q, double rho, double sigma2_x) {
  check_q(q);
  check_bg(rho, sigma2_x);
  if (tau_q.size() != q.size())
    throw std::invalid_argument("bg_denoise: tau_q length mismatch");
  if (!(tau_q.minCoeff() > 0.0))
    throw std::invalid_argument("bg_denoise: tau_q must be positive");
  Denoised out{Vector(q.size()), Vector(q.size())};
  for (Index i = 0; i < q.size(); ++i)
    bg_element(q[i], tau_q[i], rho, sigma2_x, out.x_hat[i], out.tau_post[i]);
  return out;
}

Denoised gaussian_denoise(const Vector& q, double tau_q, const Vector& gamma) {
  check_q(q);
  if (gamma.size() != q.size())
    throw std::invalid_argument("gaussian_denoise: gamma length mismatch");
  if (!(tau_q > 0.0))
    throw std::invalid_argument("gaussian_denoise: tau_q must be positive");
  Denoised out{Vector(q.size()), Vector(q.size())};
  for (Index i = 0; i < q.size(); ++i) {
    const double d = 1.0 + tau_q * gamma[i];
    out.x_hat[i] = q[i] / d;
    out.tau_post[i] = tau_q / d;
  }
  return out;
}

Denoised gaussian_denoise(const Vector& q, const Vector& tau_q, const Vector& gamma) {
  check_q(q);
  if (gamma.size() != q.size() || tau_q.size() != q.size())
    throw std::invalid_argument("gaussian_denoise: length mismatch");
  if (!(tau_q.minCoeff() > 0.0))
    throw std::invalid_argument("gaussian_denoise: tau_q must be positive");
  Denoised out{Vector(q.size()), Vector(q.size())};
  for (Index i = 0; i < q.size(); ++i) {
    const double d = 1.0 + tau_q[i] * gamma[i];
    out.x_hat[i] = q[i] / d;
    out.tau_post[i] = tau_q[i] / d;
  }
  return out;
}

Denoised denoise(const DenoiserSpec& spec, const Vector& q, double tau_q) {
  return std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BernoulliGaussianPrior>)
          return bg_denoise(q, tau_q, p.rho, p.sigma2_x);
        else
          return gaussian_denoise(q, tau_q, p.gamma);
      },
      spec);
}

Denoised denoise(const DenoiserSpec& spec, const Vector& q, const Vector& tau_q) {
  return std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BernoulliGaussianPrior>)
          return bg_denoise(q, tau_q, p.rho, p.sigma2_x);
        else
          return gaussian_denoise(q, tau_q, p.gamma);
      },
      spec);
}

}  // namespace sblkit

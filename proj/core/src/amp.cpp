#include "sblkit/amp.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sblkit/problem.hpp"

namespace sblkit {

namespace {

constexpr double kDivergenceNorm = 1e12;

bool state_diverged(const Vector& x, const Vector& s) {
  if (!x.allFinite() || !s.allFinite()) return true;
  return x.cwiseAbs().maxCoeff() > kDivergenceNorm;
}

double relative_sq_change(const Vector& x_new, const Vector& x_old) {
  const double denom = x_new.squaredNorm();
  const double num = (x_new - x_old).squaredNorm();
  if (denom == 0.0) return num == 0.0 ? 0.0 : kInf;
  return num / denom;
}

}  // namespace

RunResult amp_run(const Matrix& a, const Vector& y, const DenoiserSpec& denoiser,
                  double lambda, const AmpOptions& opts, const Vector* truth) {
  if (a.rows() != y.size())
    throw std::invalid_argument("amp_run: dimension mismatch");
  if (!(lambda > 0.0)) throw std::invalid_argument("amp_run: lambda must be positive");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0))
    throw std::invalid_argument("amp_run: damping must lie in (0, 1]");
  if (!a.allFinite() || !y.allFinite())
    throw std::invalid_argument("amp_run: non-finite inputs");

  const Index n = a.cols();
  const double inv_lambda = 1.0 / lambda;  // 0 for the noiseless limit
  const Matrix a2 = a.cwiseAbs2();

  RunResult res;
  res.damping = opts.damping;

  Vector x = Vector::Zero(n);
  Vector tau_x = Vector::Constant(n, opts.tau_x_init);
  Vector s = Vector::Zero(a.rows());

  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < opts.max_iter; ++t) {
    Vector tau_p = a2 * tau_x;
    Vector p = a * x - tau_p.cwiseProduct(s);
    Vector tau_s = (tau_p.array() + inv_lambda).inverse();
    Vector s_new = tau_s.cwiseProduct(y - p);
    if (opts.damping < 1.0) s_new = opts.damping * s_new + (1.0 - opts.damping) * s;
    Vector tau_q = (a2.transpose() * tau_s).array().inverse();
    Vector q = x + tau_q.cwiseProduct(a.transpose() * s_new);

    Vector x_new, tau_post;
    if (q.allFinite() && tau_q.allFinite() && tau_q.minCoeff() > 0.0) {
      Denoised d = denoise(denoiser, q, tau_q);
      x_new = std::move(d.x_hat);
      tau_post = std::move(d.tau_post);
    } else {
      x_new = q;  // already broken; let the divergence check below record it
      tau_post = tau_q;
    }
    if (opts.damping < 1.0) x_new = opts.damping * x_new + (1.0 - opts.damping) * x;

    const double rel = relative_sq_change(x_new, x);
    s = std::move(s_new);
    tau_x = std::move(tau_post);
    x = std::move(x_new);
    res.iterations = t + 1;

    if (truth != nullptr)
      res.nmse_trajectory_db.push_back(x.allFinite() ? nmse_db(x, *truth) : kNaN);

    if (state_diverged(x, s)) {
      res.diverged = true;
      if (opts.halt_on_divergence) break;
      continue;
    }
    if (rel <= opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.x_hat = std::move(x);
  return res;
}

}  // namespace sblkit

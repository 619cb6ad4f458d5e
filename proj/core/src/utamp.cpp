#include "sblkit/utamp.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sblkit/problem.hpp"

namespace sblkit {

RunResult utamp_run(const TransformedModel& tm, const DenoiserSpec& denoiser,
                    double lambda, const UtampOptions& opts, const Vector* truth) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("utamp_run: lambda must be positive");
  if (!(opts.tau_x_init > 0.0))
    throw std::invalid_argument("utamp_run: tau_x_init must be positive");

  const Index n = tm.n;
  const double inv_lambda = 1.0 / lambda;

  RunResult res;
  Vector x = Vector::Zero(n);
  double tau_x = opts.tau_x_init;
  Vector s = Vector::Zero(tm.m);

  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < opts.max_iter; ++t) {
    Vector tau_p = tau_x * tm.lambda_p;
    Vector p = tm.phi * x - tau_p.cwiseProduct(s);
    Vector tau_s = (tau_p.array() + inv_lambda).inverse();
    s = tau_s.cwiseProduct(tm.r - p);
    const double tau_q = double(n) / tm.lambda_p.dot(tau_s);
    Vector q = x + tau_q * (tm.phi.transpose() * s);

    if (!q.allFinite() || !(tau_q > 0.0) || !std::isfinite(tau_q))
      throw NumericError("utamp_run: non-finite state", t);

    Denoised d = denoise(denoiser, q, tau_q);
    tau_x = d.tau_post.mean();  // (tau_q / n) * 1^T g_x'
    const double rel = [&] {
      const double denom = d.x_hat.squaredNorm();
      const double num = (d.x_hat - x).squaredNorm();
      if (denom == 0.0) return num == 0.0 ? 0.0 : kInf;
      return num / denom;
    }();
    x = std::move(d.x_hat);
    res.iterations = t + 1;

    if (truth != nullptr) res.nmse_trajectory_db.push_back(nmse_db(x, *truth));
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

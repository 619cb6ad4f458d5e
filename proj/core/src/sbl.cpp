#include "sblkit/sbl.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "sblkit/denoise.hpp"
#include "sblkit/problem.hpp"

namespace sblkit {

double update_noise_precision(const Vector& r, const Vector& h_hat, const Vector& v_h) {
  if (r.size() != h_hat.size() || r.size() != v_h.size())
    throw std::invalid_argument("update_noise_precision: length mismatch");
  const double denom = (r - h_hat).squaredNorm() + v_h.sum();
  if (denom <= 0.0) {
    std::cerr << "sblkit: noise-precision denominator is zero, clamping lambda_hat to "
              << kLambdaHatMax << "\n";
    return kLambdaHatMax;
  }
  return std::clamp(double(r.size()) / denom, kLambdaHatMin, kLambdaHatMax);
}

Vector update_gamma(const Vector& x_hat, double tau_x, double eps_hat, double eta) {
  if (!(tau_x > 0.0))
    throw std::invalid_argument("update_gamma: tau_x must be positive");
  const double num = 2.0 * eps_hat + 1.0;
  return ((2.0 * eta + tau_x + x_hat.array().square()).inverse() * num)
      .min(kGammaHatMax)
      .matrix();
}

double update_epsilon_closed(const Vector& gamma_hat) {
  const double mean = gamma_hat.mean();
  const double mean_log = gamma_hat.array().log().mean();
  // Jensen gap, >= 0 analytically; values below 1e-13 are round-off from the
  // two summations (equal precisions must map to eps = 0).
  const double gap = std::log(mean) - mean_log;
  return gap < 1e-13 ? 0.0 : 0.5 * std::sqrt(gap);
}

double update_epsilon_newton(const Vector& gamma_hat, double eps_current) {
  if (!(eps_current > 0.0))
    throw std::invalid_argument("update_epsilon_newton: eps_current must be positive");
  const double mean = gamma_hat.mean();
  const double mean_log = gamma_hat.array().log().mean();
  const double e = eps_current;

  const double g = mean_log - boost::math::digamma(e) + std::log(e / mean) +
                   boost::math::digamma(e + 0.5) - std::log(e + 0.5);
  const double curvature = 1.0 / e - boost::math::trigamma(e);
  if (!(curvature < 0.0)) {
    // 1/eps < trigamma(eps) holds analytically for eps > 0; reaching this
    // branch means round-off flipped the sign, so the step direction is lost.
    std::cerr << "sblkit: degenerate curvature in shape update, using closed form\n";
    return update_epsilon_closed(gamma_hat);
  }
  const double inv_next = 1.0 / e + g / (e * e * curvature);
  // inv_next <= 0 means the step ran past +inf; land on the upper clamp.
  const double next = inv_next > 0.0 ? 1.0 / inv_next : 1e12;
  return std::clamp(next, 1e-12, 1e12);
}

RunResult sbl_run(const TransformedModel& tm, const SblConfig& cfg,
                  const Vector* truth, std::vector<SblTraceRow>* trace,
                  const SblObserver& observer) {
  if (cfg.max_iter < 1) throw std::invalid_argument("sbl_run: max_iter must be >= 1");
  if (!(cfg.tau_x_init > 0.0 && cfg.gamma_init > 0.0 && cfg.lambda_init > 0.0 &&
        cfg.eps_init >= 0.0 && cfg.eta >= 0.0))
    throw std::invalid_argument("sbl_run: invalid initialization");
  if (cfg.fixed_lambda && !(*cfg.fixed_lambda > 0.0))
    throw std::invalid_argument("sbl_run: fixed_lambda must be positive");

  RunResult res;
  if (tm.r.isZero(0.0)) {
    std::cerr << "sblkit: r = 0, returning the zero estimate\n";
    res.x_hat = Vector::Zero(tm.n);
    res.converged = true;
    res.lambda_hat_final = cfg.lambda_init;
    res.eps_hat_final = cfg.eps_init;
    return res;
  }

  SblState st;
  st.x_hat = Vector::Zero(tm.n);
  st.tau_x = cfg.tau_x_init;
  st.s = Vector::Zero(tm.m);
  st.gamma_hat = Vector::Constant(tm.n, cfg.gamma_init);
  st.lambda_hat = cfg.lambda_init;
  st.eps_hat = cfg.eps_init;

  const double n = double(tm.n);
  const auto t0 = std::chrono::steady_clock::now();
  while (true) {
    Vector tau_p = st.tau_x * tm.lambda_p;
    Vector p = tm.phi * st.x_hat - tau_p.cwiseProduct(st.s);

    if (cfg.fixed_lambda) {
      st.lambda_hat = *cfg.fixed_lambda;
    } else {
      // The h-belief uses lambda_hat from the previous iteration; the fresh
      // estimate below then feeds tau_s. Written with numerator and
      // denominator multiplied by tau_p so that zero-padded lambda_p rows
      // (rank-deficient A) stay finite: v_h -> 0, h_hat -> p.
      Vector denom_h = (1.0 + st.lambda_hat * tau_p.array()).matrix();
      st.v_h = tau_p.cwiseQuotient(denom_h);
      st.h_hat = (st.lambda_hat * tau_p.cwiseProduct(tm.r) + p).cwiseQuotient(denom_h);
      st.lambda_hat = update_noise_precision(tm.r, st.h_hat, st.v_h);
    }

    Vector tau_s = (tau_p.array() + 1.0 / st.lambda_hat).inverse();
    st.s = tau_s.cwiseProduct(tm.r - p);
    const double tau_q = n / tm.lambda_p.dot(tau_s);
    Vector q = st.x_hat + tau_q * (tm.phi.transpose() * st.s);

    if (!q.allFinite() || !std::isfinite(tau_q) || !(tau_q > 0.0))
      throw NumericError("sbl_run: non-finite state", st.t);

    Denoised d = gaussian_denoise(q, tau_q, st.gamma_hat);
    const double tau_x_new = d.tau_post.mean();
    const double rel = [&] {
      const double nn = d.x_hat.squaredNorm();
      const double num = (d.x_hat - st.x_hat).squaredNorm();
      if (nn == 0.0) return num == 0.0 ? 0.0 : kInf;
      return num / nn;
    }();

    st.x_hat = std::move(d.x_hat);
    st.tau_x = tau_x_new;
    st.gamma_hat = update_gamma(st.x_hat, st.tau_x, st.eps_hat, cfg.eta);
    st.eps_hat = cfg.eps_update == SblConfig::EpsUpdate::kClosedForm
                     ? update_epsilon_closed(st.gamma_hat)
                     : update_epsilon_newton(st.gamma_hat, std::max(st.eps_hat, 1e-12));
    st.t += 1;

    if (!st.x_hat.allFinite() || !std::isfinite(st.lambda_hat) ||
        !std::isfinite(st.eps_hat))
      throw NumericError("sbl_run: non-finite state", st.t - 1);

    const double nmse = truth != nullptr ? nmse_db(st.x_hat, *truth) : kNaN;
    if (truth != nullptr) res.nmse_trajectory_db.push_back(nmse);
    if (trace != nullptr)
      trace->push_back({st.t, nmse, st.lambda_hat, st.eps_hat, st.tau_x});
    if (observer) observer(st, tau_p, tau_s, tau_q);

    if (rel <= cfg.tol || st.t >= cfg.max_iter) {
      res.converged = rel <= cfg.tol;
      break;
    }
  }
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.iterations = st.t;
  res.x_hat = std::move(st.x_hat);
  res.lambda_hat_final = st.lambda_hat;
  res.eps_hat_final = st.eps_hat;
  return res;
}

}  // namespace sblkit

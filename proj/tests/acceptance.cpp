// Acceptance suite: every shipped claim is exercised end to end and reported
// as one PASS/FAIL line. The binary exits nonzero if any criterion fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sblkit/amp.hpp"
#include "sblkit/harness.hpp"
#include "sblkit/oracle.hpp"
#include "sblkit/problem.hpp"
#include "sblkit/rng.hpp"
#include "sblkit/sbl.hpp"
#include "sblkit/transform.hpp"
#include "sblkit/utamp.hpp"
#include "test_util.hpp"

using namespace sblkit;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  criterion %d: %-28s  %s\n", ok ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void parallel_for(int total, const std::function<void(int)>& body) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) body(i);
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < hw; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

// --- criterion 1: UTAMP with a fixed Gaussian prior reaches the directly
// solved LMMSE estimate on all four difficult families, kappa = 1e6 included.
void criterion_lmmse_fixed_point() {
  const Index m = 150, n = 200;
  const double lambda = 100.0;
  const Vector gamma = Vector::Ones(n);

  struct Case {
    const char* name;
    MatrixSpec spec;
  };
  const std::vector<Case> cases = {
      {"ill_conditioned(1e6)", {m, n, IllConditioned{1e6}}},
      {"correlated(0.9)", {m, n, Correlated{0.9}}},
      {"nonzero_mean(10)", {m, n, NonzeroMean{10.0}}},
      {"low_rank(75)", {m, n, LowRank{75}}},
  };

  bool ok = true;
  std::string detail;
  for (size_t i = 0; i < cases.size(); ++i) {
    const SparseProblem p =
        make_problem(cases[i].spec, 0.2, 1.0, 40.0, 9000 + std::uint64_t(i));
    const TransformedModel tm = unitary_transform(p.a, p.y);
    UtampOptions opts;
    opts.max_iter = 50000;
    opts.tol = 1e-28;
    const RunResult res = utamp_run(tm, GaussianPrior{gamma}, lambda, opts);
    const Vector direct = testutil::lmmse_solve(tm.phi, tm.r, gamma, lambda);
    const double rel = (res.x_hat - direct).norm() / direct.norm();
    if (rel > 1e-6) ok = false;
    detail += std::string(cases[i].name) + " rel=" + fmt(rel) + "  ";
  }
  report(1, "LMMSE fixed-point oracle", ok, detail);
}

// --- criterion 2: spike-and-slab posterior matches adaptive quadrature.
void criterion_denoiser_quadrature() {
  Rng rng(777);
  int bad = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const double s2 = 0.1 + 9.9 * rng.uniform();
    const double tau = 0.01 + 4.0 * rng.uniform();
    const double rho = 0.05 + 0.9 * rng.uniform();
    const double q = (12.0 * rng.uniform() - 6.0) * std::sqrt(s2 + tau);

    double mean, var;
    testutil::bg_posterior_quadrature(q, tau, rho, s2, mean, var);
    Vector qv(1);
    qv << q;
    const Denoised d = bg_denoise(qv, tau, rho, s2);
    const double em = std::abs(d.x_hat[0] - mean) / std::max(1.0, std::abs(mean));
    const double ev = std::abs(d.tau_post[0] - var) / std::max(1.0, var);
    worst = std::max({worst, em, ev});
    if (em > 1e-8 || ev > 1e-8) ++bad;
  }
  report(2, "denoiser vs quadrature", bad == 0,
         "1000 tuples, worst rel err " + fmt(worst));
}

// --- criterion 3: |C|^2 d = (C Diag(d) C^T)_D 1.
void criterion_square_identity() {
  Rng rng(555);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Index m = 3 + Index(rng.next_u64() % 28);
    const Index n = 2 + Index(rng.next_u64() % 20);
    Matrix c(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) c(i, j) = rng.normal();
    Vector d(n);
    for (Index j = 0; j < n; ++j) d[j] = std::abs(rng.normal());
    const Vector lhs = c.cwiseAbs2() * d;
    const Vector rhs = (c * d.asDiagonal() * c.transpose()).diagonal();
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  report(3, "elementwise-square identity", worst < 1e-12,
         "100 instances, worst abs err " + fmt(worst));
}

// --- criterion 4: UTAMP-SBL tracks the support-oracle bound within 3 dB at
// desk scale across the four families, tested at the hardest sweep values of
// the claimed region and one easier interior point each.
void criterion_bound_tracking() {
  const Index m = 400, n = 500;
  const int trials = 20;
  struct Point {
    const char* label;
    MatrixSpec spec;
  };
  const std::vector<Point> points = {
      {"kappa=10", {m, n, IllConditioned{10.0}}},
      {"kappa=1e3", {m, n, IllConditioned{1e3}}},
      {"c=0.1", {m, n, Correlated{0.1}}},
      {"c=0.5", {m, n, Correlated{0.5}}},
      {"mu=0.1", {m, n, NonzeroMean{0.1}}},
      {"mu=1", {m, n, NonzeroMean{1.0}}},
      // R < M caps the rank ratio below M/N = 0.8 at this aspect ratio
      {"R/N=0.75", {m, n, LowRank{Index(0.75 * double(n))}}},
      {"R/N=0.6", {m, n, LowRank{Index(0.6 * double(n))}}},
  };

  std::vector<std::vector<double>> sbl_nmse(points.size(),
                                            std::vector<double>(trials));
  std::vector<std::vector<double>> oracle_nmse(points.size(),
                                               std::vector<double>(trials));
  parallel_for(int(points.size()) * trials, [&](int task) {
    const size_t pi = size_t(task) / size_t(trials);
    const int ti = task % trials;
    const std::uint64_t seed =
        mix_seed(mix_seed(40000, std::uint64_t(pi)), std::uint64_t(ti));
    const SparseProblem p = make_problem(points[pi].spec, 0.1, 1.0, 60.0, seed);
    const TransformedModel tm = unitary_transform(p.a, p.y);
    sbl_nmse[pi][size_t(ti)] = nmse_db(sbl_run(tm).x_hat, p.signal.values);
    oracle_nmse[pi][size_t(ti)] =
        oracle_mmse(p.a, p.y, p.signal.support, p.lambda_true, p.signal.sigma2_x,
                    &p.signal.values)
            .nmse_db;
  });

  bool ok = true;
  std::string detail;
  for (size_t pi = 0; pi < points.size(); ++pi) {
    const double med_sbl = testutil::median(sbl_nmse[pi]);
    const double med_oracle = testutil::median(oracle_nmse[pi]);
    const double gap = med_sbl - med_oracle;
    if (gap > 3.0) ok = false;
    detail += std::string(points[pi].label) + " gap=" + fmt(gap) + "dB  ";
  }
  report(4, "bound tracking (3 dB)", ok, detail);
}

// --- criterion 5: the undamped AMP baseline diverges on nonzero-mean
// matrices while UTAMP-SBL converges on the same seeds.
void criterion_robustness_separation() {
  const Index m = 400, n = 500;
  const int trials = 20;
  std::vector<int> amp_diverged(trials, 0), sbl_converged(trials, 0),
      sbl_diverged(trials, 0);

  parallel_for(trials, [&](int ti) {
    const std::uint64_t seed = mix_seed(50000, std::uint64_t(ti));
    const SparseProblem p =
        make_problem({m, n, NonzeroMean{1.0}}, 0.1, 1.0, 60.0, seed);

    const DenoiserSpec prior = BernoulliGaussianPrior{0.1, 1.0};
    const RunResult ra = amp_run(p.a, p.y, prior, p.lambda_true);
    amp_diverged[size_t(ti)] = ra.diverged ? 1 : 0;

    try {
      const TransformedModel tm = unitary_transform(p.a, p.y);
      const RunResult rs = sbl_run(tm);
      sbl_converged[size_t(ti)] = rs.converged ? 1 : 0;
    } catch (const NumericError&) {
      sbl_diverged[size_t(ti)] = 1;
    }
  });

  int amp_div = 0, sbl_conv = 0, sbl_div = 0;
  for (int t = 0; t < trials; ++t) {
    amp_div += amp_diverged[size_t(t)];
    sbl_conv += sbl_converged[size_t(t)];
    sbl_div += sbl_diverged[size_t(t)];
  }
  const double rate = double(amp_div) / trials;
  const bool ok = rate >= 0.9 && sbl_conv == trials && sbl_div == 0;
  report(5, "robustness separation", ok,
         "amp divergence rate " + fmt(rate) + ", utamp-sbl converged " +
             std::to_string(sbl_conv) + "/" + std::to_string(trials));
}

// --- criterion 6: closed-form and digamma-iteration shape updates agree, and
// the closed form reproduces the arithmetic oracle on {1, e^2}. NMSE follows
// the trial-averaged (ratio mean, then dB) definition over the 10 runs, at
// 30 dB SNR where both updates are in their common operating regime; at very
// high SNR the closed form wins by several dB, which is the documented reason
// it is the default.
void criterion_eps_cross_validation() {
  Vector g(2);
  g << 1.0, std::exp(2.0);
  const double eps = update_epsilon_closed(g);
  bool ok = std::abs(eps - 0.3293) <= 1e-4;
  std::string detail = "eps({1,e^2})=" + fmt(eps);

  const Index m = 400, n = 500;
  const int seeds = 10;
  std::vector<double> ratio_closed(seeds), ratio_newton(seeds);
  parallel_for(seeds, [&](int si) {
    const SparseProblem p = make_problem({m, n, IidGaussian{}}, 0.1, 1.0, 30.0,
                                         mix_seed(60000, std::uint64_t(si)));
    const TransformedModel tm = unitary_transform(p.a, p.y);
    const Vector& truth = p.signal.values;
    SblConfig closed;
    SblConfig newton;
    newton.eps_update = SblConfig::EpsUpdate::kNewton;
    ratio_closed[size_t(si)] = (sbl_run(tm, closed).x_hat - truth).squaredNorm() /
                               truth.squaredNorm();
    ratio_newton[size_t(si)] = (sbl_run(tm, newton).x_hat - truth).squaredNorm() /
                               truth.squaredNorm();
  });
  double sum_c = 0.0, sum_n = 0.0;
  for (int s = 0; s < seeds; ++s) {
    sum_c += ratio_closed[size_t(s)];
    sum_n += ratio_newton[size_t(s)];
  }
  const double gap = std::abs(10.0 * std::log10(sum_c / sum_n));
  ok = ok && gap < 1.0;
  report(6, "eps-update cross-validation", ok,
         detail + ", 10-run NMSE gap " + fmt(gap) + " dB");
}

// --- criterion 7: learned noise precision within a factor of 2 of the truth.
void criterion_noise_learning() {
  const Index m = 400, n = 500;
  const int trials = 20;
  std::vector<double> ratios(trials, 0.0);
  std::vector<int> converged(trials, 0);
  parallel_for(trials, [&](int ti) {
    const SparseProblem p = make_problem({m, n, IidGaussian{}}, 0.1, 1.0, 60.0,
                                         mix_seed(70000, std::uint64_t(ti)));
    const TransformedModel tm = unitary_transform(p.a, p.y);
    const RunResult res = sbl_run(tm);
    converged[size_t(ti)] = res.converged ? 1 : 0;
    ratios[size_t(ti)] = res.lambda_hat_final / p.lambda_true;
  });
  bool ok = true;
  double lo = kInf, hi = 0.0;
  int conv = 0;
  for (int t = 0; t < trials; ++t) {
    conv += converged[size_t(t)];
    if (!converged[size_t(t)]) continue;
    lo = std::min(lo, ratios[size_t(t)]);
    hi = std::max(hi, ratios[size_t(t)]);
    if (ratios[size_t(t)] < 0.5 || ratios[size_t(t)] > 2.0) ok = false;
  }
  ok = ok && conv == trials;
  report(7, "noise-precision learning", ok,
         "lambda_hat/lambda in [" + fmt(lo) + ", " + fmt(hi) + "], converged " +
             std::to_string(conv) + "/" + std::to_string(trials));
}

// --- criterion 8: UTAMP-SBL wall time (SVD included) beats the undamped AMP
// baseline run to the same iteration budget. Single-threaded timing.
void criterion_runtime_ordering() {
  const Index m = 400, n = 500;
  const int instances = 5;
  std::vector<double> t_sbl, t_amp;
  for (int i = 0; i < instances; ++i) {
    const SparseProblem p = make_problem({m, n, IllConditioned{1e3}}, 0.3, 1.0,
                                         60.0, mix_seed(80000, std::uint64_t(i)));

    const auto t0 = std::chrono::steady_clock::now();
    const TransformedModel tm = unitary_transform(p.a, p.y);
    const RunResult rs = sbl_run(tm);
    t_sbl.push_back(std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0).count());
    (void)rs;

    AmpOptions opts;
    opts.max_iter = 300;  // same budget as the SBL default
    opts.tol = 0.0;
    opts.halt_on_divergence = false;
    const DenoiserSpec prior = BernoulliGaussianPrior{0.3, 1.0};
    const RunResult ra = amp_run(p.a, p.y, prior, p.lambda_true, opts);
    t_amp.push_back(ra.wall_time_s * 1e3);
  }
  const double med_sbl = testutil::median(t_sbl);
  const double med_amp = testutil::median(t_amp);
  report(8, "runtime ordering", med_sbl < med_amp,
         "utamp-sbl " + fmt(med_sbl) + " ms (incl. SVD) vs amp budget run " +
             fmt(med_amp) + " ms");
}

// --- criterion 9: every CSV row regenerates bit-identically from its seed
// (wall-clock column excepted).
void criterion_determinism() {
  ExperimentConfig cfg;
  cfg.family = MatrixFamily::kIllConditioned;
  cfg.sweep = {1.0, 100.0};
  cfg.n = 40;
  cfg.m = 32;
  cfg.rho = 0.2;
  cfg.snr_db = 40.0;
  cfg.trials = 3;
  cfg.algorithms = {Algorithm::kAmp, Algorithm::kUtampSbl, Algorithm::kOracle};
  cfg.seed = 424242;
  cfg.max_iter = 120;

  const auto rows = run_experiment(cfg);

  auto deterministic_fields = [](const SweepRow& row) {
    std::ostringstream out;
    write_rows_csv(out, {row});
    std::istringstream in(out.str());
    std::string header, line, field, rebuilt;
    std::getline(in, header);
    std::getline(in, line);
    std::istringstream ls(line);
    for (int i = 0; std::getline(ls, field, ','); ++i)
      if (i != 5) rebuilt += field + "|";  // drop time_ms
    return rebuilt;
  };

  // Round-trip through the CSV, then regenerate every row from its seed.
  std::stringstream buf;
  write_rows_csv(buf, rows);
  const auto parsed = read_rows_csv(buf);
  bool ok = parsed.size() == rows.size();
  int checked = 0;
  for (size_t i = 0; ok && i < parsed.size(); ++i) {
    const SweepRow regen = regenerate_row(cfg, parsed[i]);
    if (deterministic_fields(regen) != deterministic_fields(parsed[i])) ok = false;
    ++checked;
  }
  report(9, "seeded determinism", ok,
         std::to_string(checked) + "/" + std::to_string(rows.size()) +
             " rows regenerated bit-identically");
}

}  // namespace

int main() {
  // The harness parallelizes at trial level; nested BLAS threading only
  // oversubscribes the cores and makes timings noisy.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);
  const auto t0 = std::chrono::steady_clock::now();
  criterion_lmmse_fixed_point();
  criterion_denoiser_quadrature();
  criterion_square_identity();
  criterion_bound_tracking();
  criterion_robustness_separation();
  criterion_eps_cross_validation();
  criterion_noise_learning();
  criterion_runtime_ordering();
  criterion_determinism();
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/9 criteria passed (%.1f s)\n", 9 - g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}

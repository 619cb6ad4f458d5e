#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/QR>

#include "sblkit/amp.hpp"
#include "sblkit/problem.hpp"
#include "sblkit/rng.hpp"
#include "test_util.hpp"

using namespace sblkit;

TEST_CASE("amp_run: orthonormal columns converge to the LMMSE solution") {
  const Index m = 80, n = 50;
  const Matrix g = gen_matrix({m, n, IidGaussian{}}, 1);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix a = Matrix(qr.householderQ()).leftCols(n);

  const SparseSignal sig = gen_signal(n, 0.5, 1.0, 2);
  const Vector y = a * sig.values;  // noiseless observation

  const double lambda = 10.0;
  const Vector gamma = Vector::Ones(n);
  AmpOptions opts;
  opts.max_iter = 50;
  opts.tol = 1e-24;
  const RunResult res = amp_run(a, y, GaussianPrior{gamma}, lambda, opts);

  const Vector x_direct = testutil::lmmse_solve(a, y, gamma, lambda);
  CHECK(res.iterations <= 50);
  CHECK_FALSE(res.diverged);
  CHECK((res.x_hat - x_direct).norm() < 1e-8 * x_direct.norm());
}

TEST_CASE("amp_run: iid Gaussian desk run reaches -40 dB median over 20 seeds") {
  const Index m = 400, n = 500;
  std::vector<double> nmse;
  for (int seed = 0; seed < 20; ++seed) {
    const SparseProblem p = make_problem({m, n, IidGaussian{}}, 0.1, 1.0, 60.0,
                                         1000 + std::uint64_t(seed));
    const DenoiserSpec prior = BernoulliGaussianPrior{0.1, 1.0};
    const RunResult res = amp_run(p.a, p.y, prior, p.lambda_true);
    REQUIRE_FALSE(res.diverged);
    nmse.push_back(nmse_db(res.x_hat, p.signal.values));
  }
  CHECK(testutil::median(nmse) <= -40.0);
}

TEST_CASE("amp_run: undamped AMP diverges on a nonzero-mean matrix") {
  const SparseProblem p = make_problem({200, 250, NonzeroMean{10.0}}, 0.1, 1.0,
                                       60.0, 77);
  const DenoiserSpec prior = BernoulliGaussianPrior{0.1, 1.0};
  const RunResult res = amp_run(p.a, p.y, prior, p.lambda_true);
  CHECK(res.diverged);
}

TEST_CASE("amp_run: trajectories match a straight-line transcription") {
  const Index m = 30, n = 40;
  const double rho = 0.3, s2 = 1.0;
  const SparseProblem p = make_problem({m, n, IidGaussian{}}, rho, s2, 30.0, 5);

  const int iters = 25;
  const auto ref = testutil::reference_vector_amp(p.a, p.y, rho, s2,
                                                  p.lambda_true, iters);

  AmpOptions opts;
  opts.max_iter = iters;
  opts.tol = 0.0;  // run the full budget
  const Vector truth = p.signal.values;
  const RunResult res =
      amp_run(p.a, p.y, BernoulliGaussianPrior{rho, s2}, p.lambda_true, opts, &truth);

  REQUIRE(res.iterations == iters);
  for (Index j = 0; j < n; ++j)
    CHECK(res.x_hat[j] == doctest::Approx(ref.back()[size_t(j)]).epsilon(1e-12));

  // Per-iteration agreement: rerun with truncated budgets (the run is
  // deterministic, so iterate t of the full run equals the t-budget run).
  for (int t : {1, 4, 9, 16}) {
    AmpOptions trunc = opts;
    trunc.max_iter = t;
    const RunResult rt =
        amp_run(p.a, p.y, BernoulliGaussianPrior{rho, s2}, p.lambda_true, trunc);
    for (Index j = 0; j < n; ++j)
      CHECK(rt.x_hat[j] == doctest::Approx(ref[size_t(t - 1)][size_t(j)]).epsilon(1e-12));
  }
  for (int t = 0; t < iters; ++t) {
    Vector xt(n);
    for (Index j = 0; j < n; ++j) xt[j] = ref[size_t(t)][size_t(j)];
    CHECK(std::abs(res.nmse_trajectory_db[size_t(t)] - nmse_db(xt, truth)) < 1e-9);
  }
}

TEST_CASE("amp_run: damping is recorded and keeps easy instances convergent") {
  const SparseProblem p = make_problem({100, 120, IidGaussian{}}, 0.2, 1.0, 40.0, 9);
  AmpOptions opts;
  opts.damping = 0.5;
  const RunResult res =
      amp_run(p.a, p.y, BernoulliGaussianPrior{0.2, 1.0}, p.lambda_true, opts);
  CHECK(res.damping == 0.5);
  CHECK_FALSE(res.diverged);
  CHECK(res.converged);
}

TEST_CASE("amp_run: determinism") {
  const SparseProblem p = make_problem({60, 80, Correlated{0.3}}, 0.2, 1.0, 40.0, 4);
  const DenoiserSpec prior = BernoulliGaussianPrior{0.2, 1.0};
  const RunResult r1 = amp_run(p.a, p.y, prior, p.lambda_true);
  const RunResult r2 = amp_run(p.a, p.y, prior, p.lambda_true);
  CHECK(r1.x_hat == r2.x_hat);
  CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("amp_run: argument validation") {
  const Matrix a = Matrix::Ones(3, 4);
  const Vector y = Vector::Ones(3);
  const DenoiserSpec prior = BernoulliGaussianPrior{0.5, 1.0};
  CHECK_THROWS_AS(amp_run(a, Vector::Ones(2), prior, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(amp_run(a, y, prior, 0.0), std::invalid_argument);
  AmpOptions bad;
  bad.damping = 1.5;
  CHECK_THROWS_AS(amp_run(a, y, prior, 1.0, bad), std::invalid_argument);
}

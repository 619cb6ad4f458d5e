// Command-line front end: generate problem instances, run a single solver,
// evaluate the support-oracle bound, or reproduce a Monte-Carlo sweep.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure.

#include <CLI11.hpp>

#include <cstdlib>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sblkit/amp.hpp"
#include "sblkit/harness.hpp"
#include "sblkit/io.hpp"
#include "sblkit/oracle.hpp"
#include "sblkit/plot.hpp"
#include "sblkit/transform.hpp"
#include "sblkit/utamp.hpp"

namespace fs = std::filesystem;
using namespace sblkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

MatrixSpec problem_spec_from_config(const ConfigFile& file, Index& n, Index& m,
                                    double& rho, double& sigma2_x, double& snr_db,
                                    bool& noiseless) {
  const MatrixFamily family = parse_family(file.get_string("problem", "family"));
  n = Index(file.get_int_or("problem", "n", 500));
  m = Index(file.get_int_or("problem", "m", 400));
  rho = file.get_double_or("problem", "rho", 0.1);
  sigma2_x = file.get_double_or("problem", "sigma2_x", 1.0);
  snr_db = file.get_double_or("problem", "snr_db", 60.0);
  noiseless = file.get_bool_or("problem", "noiseless", false);

  MatrixSpec spec;
  spec.rows = m;
  spec.cols = n;
  switch (family) {
    case MatrixFamily::kIidGaussian: spec.kind = IidGaussian{}; break;
    case MatrixFamily::kIdentity: spec.kind = Identity{}; break;
    case MatrixFamily::kIllConditioned:
      spec.kind = IllConditioned{file.get_double("problem", "kappa")};
      break;
    case MatrixFamily::kCorrelated:
      spec.kind = Correlated{file.get_double("problem", "c")};
      break;
    case MatrixFamily::kNonzeroMean:
      spec.kind = NonzeroMean{file.get_double("problem", "mu")};
      break;
    case MatrixFamily::kLowRank: {
      const double ratio = file.get_double("problem", "rank_ratio");
      spec.kind = LowRank{Index(std::llround(ratio * double(n)))};
      break;
    }
  }
  file.ensure_fully_consumed();
  spec.validate();
  return spec;
}

int cmd_generate(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_dir) {
  const ConfigFile file = ConfigFile::parse_file(config_path);
  Index n, m;
  double rho, sigma2_x, snr_db;
  bool noiseless;
  const MatrixSpec spec =
      problem_spec_from_config(file, n, m, rho, sigma2_x, snr_db, noiseless);

  const SparseProblem prob =
      make_problem(spec, rho, sigma2_x, noiseless ? kInf : snr_db, seed);

  fs::create_directories(out_dir);
  const fs::path bin = fs::path(out_dir) / "problem.bin";
  const fs::path csv = fs::path(out_dir) / "problem.csv";
  save_problem(bin.string(), prob);
  write_problem_csv(csv.string(), prob);
  std::cout << "wrote " << bin.string() << " (" << m << "x" << n << ", "
            << prob.signal.support.size() << " nonzeros, seed " << seed << ")\n";
  std::cout << "wrote " << csv.string() << "\n";
  return kExitOk;
}

int cmd_run(const std::string& in_path, const std::string& alg_name, int max_iter,
            double tol, double damping, const std::string& eps_update,
            const std::string& trace_path) {
  const Algorithm alg = parse_algorithm(alg_name);
  if (alg == Algorithm::kOracle)
    throw ConfigError("use the 'bound' subcommand for the oracle");
  if (!trace_path.empty() && alg != Algorithm::kUtampSbl)
    throw ConfigError("--trace is only available for --alg utamp-sbl");

  const SparseProblem prob = load_problem(in_path);
  const Vector& truth = prob.signal.values;

  RunResult res;
  if (alg == Algorithm::kAmp) {
    AmpOptions opts;
    opts.max_iter = max_iter;
    opts.tol = tol;
    opts.damping = damping;
    const DenoiserSpec prior =
        BernoulliGaussianPrior{prob.signal.rho, prob.signal.sigma2_x};
    res = amp_run(prob.a, prob.y, prior, prob.lambda_true, opts, &truth);
  } else {
    const TransformedModel tm = unitary_transform(prob.a, prob.y);
    if (alg == Algorithm::kUtamp) {
      UtampOptions opts;
      opts.max_iter = max_iter;
      opts.tol = tol;
      const DenoiserSpec prior =
          BernoulliGaussianPrior{prob.signal.rho, prob.signal.sigma2_x};
      res = utamp_run(tm, prior, prob.lambda_true, opts, &truth);
    } else {
      SblConfig cfg;
      cfg.max_iter = max_iter;
      cfg.tol = tol;
      cfg.eps_update = eps_update == "newton_iteration"
                           ? SblConfig::EpsUpdate::kNewton
                           : SblConfig::EpsUpdate::kClosedForm;
      std::vector<SblTraceRow> trace;
      res = sbl_run(tm, cfg, &truth, trace_path.empty() ? nullptr : &trace);
      if (!trace_path.empty()) {
        std::ofstream f(trace_path);
        if (!f) throw std::runtime_error("cannot open for writing: " + trace_path);
        f << "t,nmse_db,lambda_hat,eps_hat,tau_x\n";
        for (const auto& row : trace)
          f << row.t << ',' << format_double(std::max(row.nmse_db, kNmseFloorDb))
            << ',' << format_double(row.lambda_hat) << ','
            << format_double(row.eps_hat) << ',' << format_double(row.tau_x) << '\n';
        std::cout << "wrote " << trace_path << "\n";
      }
    }
  }

  std::cout << "alg:        " << alg_name << "\n";
  std::cout << "nmse_db:    " << format_double(std::max(nmse_db(res.x_hat, truth),
                                                        kNmseFloorDb)) << "\n";
  std::cout << "iterations: " << res.iterations << "\n";
  std::cout << "converged:  " << (res.converged ? "yes" : "no") << "\n";
  std::cout << "diverged:   " << (res.diverged ? "yes" : "no") << "\n";
  std::cout << "time_ms:    " << format_double(res.wall_time_s * 1e3) << "\n";
  if (alg == Algorithm::kUtampSbl) {
    std::cout << "lambda_hat: " << format_double(res.lambda_hat_final) << "\n";
    std::cout << "eps_hat:    " << format_double(res.eps_hat_final) << "\n";
  }
  return kExitOk;
}

int cmd_bound(const std::string& in_path) {
  const SparseProblem prob = load_problem(in_path);
  const OracleResult res =
      oracle_mmse(prob.a, prob.y, prob.signal.support, prob.lambda_true,
                  prob.signal.sigma2_x, &prob.signal.values);
  std::cout << "alg:        oracle\n";
  std::cout << "nmse_db:    " << format_double(std::max(res.nmse_db, kNmseFloorDb))
            << "\n";
  std::cout << "support:    " << prob.signal.support.size() << " indices\n";
  return kExitOk;
}

int cmd_bench(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out_dir, bool paper_scale, int threads) {
  const ConfigFile file = ConfigFile::parse_file(config_path);
  ExperimentConfig cfg = ExperimentConfig::from_config(file);
  if (seed) cfg.seed = *seed;
  if (paper_scale) cfg.apply_paper_scale();
  if (threads > 0) cfg.threads = threads;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (cfg.out_dir.empty()) cfg.out_dir = ".";

  const std::vector<SweepRow> rows = run_experiment(cfg);

  fs::create_directories(cfg.out_dir);
  const fs::path csv = fs::path(cfg.out_dir) / "rows.csv";
  const fs::path svg = fs::path(cfg.out_dir) / "plot.svg";
  const fs::path dat = fs::path(cfg.out_dir) / "plot_data.csv";
  write_rows_csv(csv.string(), rows);
  PlotStyle style;
  style.title = "NMSE, " + to_string(cfg.family) + " family";
  style.x_label = to_string(cfg.family) + " sweep value";
  emit_plot(rows, style, svg.string(), dat.string());

  write_rows_csv(std::cout, rows);
  std::cout << "wrote " << csv.string() << ", " << svg.string() << ", "
            << dat.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  // Trials parallelize at the harness level; keep BLAS single-threaded so
  // wall-time columns are comparable. Overridable via the environment.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  CLI::App app{"sparse-recovery toolkit: UTAMP-SBL and friends"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_path, trace_path;
  std::string alg_name = "utamp-sbl", eps_update = "closed_form";
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> bench_seed;
  bool paper_scale = false;
  int max_iter = 300, threads = 0;
  double tol = 1e-10, damping = 1.0;

  auto* gen = app.add_subcommand("generate", "draw a problem instance to disk");
  gen->add_option("--config", config_path, "config file with a [problem] section")
      ->required();
  gen->add_option("--seed", seed, "instance seed");
  gen->add_option("--out", out_dir, "output directory");

  auto* run = app.add_subcommand("run", "run one solver on a stored instance");
  run->add_option("--in", in_path, "problem.bin from 'generate'")->required();
  run->add_option("--alg", alg_name, "amp | utamp | utamp-sbl")->required();
  run->add_option("--max-iter", max_iter, "iteration budget");
  run->add_option("--tol", tol, "relative squared change tolerance");
  run->add_option("--damping", damping, "AMP damping factor in (0, 1]");
  run->add_option("--eps-update", eps_update, "closed_form | newton_iteration");
  run->add_option("--trace", trace_path, "per-iteration trace CSV (utamp-sbl)");

  auto* bound = app.add_subcommand("bound", "support-oracle bound on an instance");
  bound->add_option("--in", in_path, "problem.bin from 'generate'")->required();

  auto* bench = app.add_subcommand("bench", "Monte-Carlo sweep from a config file");
  bench->add_option("--config", config_path, "config file with [experiment] section")
      ->required();
  bench->add_option("--seed", bench_seed, "override experiment.seed");
  bench->add_option("--out", out_dir, "output directory");
  bench->add_flag("--paper-scale", paper_scale, "use N=1000, M=800");
  bench->add_option("--threads", threads, "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed())
      return cmd_generate(config_path, seed, out_dir.empty() ? "out" : out_dir);
    if (run->parsed())
      return cmd_run(in_path, alg_name, max_iter, tol, damping, eps_update, trace_path);
    if (bound->parsed()) return cmd_bound(in_path);
    if (bench->parsed())
      return cmd_bench(config_path, bench_seed, out_dir, paper_scale, threads);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::runtime_error& e) {
    // remaining runtime errors are file/input problems
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

#include "sblkit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "sblkit/amp.hpp"
#include "sblkit/io.hpp"
#include "sblkit/oracle.hpp"
#include "sblkit/rng.hpp"
#include "sblkit/transform.hpp"
#include "sblkit/utamp.hpp"

namespace sblkit {

std::string to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::kAmp: return "amp";
    case Algorithm::kUtamp: return "utamp";
    case Algorithm::kUtampSbl: return "utamp-sbl";
    case Algorithm::kOracle: return "oracle";
  }
  throw std::logic_error("unreachable");
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "amp") return Algorithm::kAmp;
  if (name == "utamp") return Algorithm::kUtamp;
  if (name == "utamp-sbl") return Algorithm::kUtampSbl;
  if (name == "oracle") return Algorithm::kOracle;
  throw ConfigError("unknown algorithm: " + name);
}

std::string to_string(MatrixFamily family) {
  switch (family) {
    case MatrixFamily::kIidGaussian: return "iid_gaussian";
    case MatrixFamily::kIdentity: return "identity";
    case MatrixFamily::kIllConditioned: return "ill_conditioned";
    case MatrixFamily::kCorrelated: return "correlated";
    case MatrixFamily::kNonzeroMean: return "nonzero_mean";
    case MatrixFamily::kLowRank: return "low_rank";
  }
  throw std::logic_error("unreachable");
}

MatrixFamily parse_family(const std::string& name) {
  if (name == "iid_gaussian") return MatrixFamily::kIidGaussian;
  if (name == "identity") return MatrixFamily::kIdentity;
  if (name == "ill_conditioned") return MatrixFamily::kIllConditioned;
  if (name == "correlated") return MatrixFamily::kCorrelated;
  if (name == "nonzero_mean") return MatrixFamily::kNonzeroMean;
  if (name == "low_rank") return MatrixFamily::kLowRank;
  throw ConfigError("unknown matrix family: " + name);
}

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& file) {
  ExperimentConfig cfg;
  cfg.family = parse_family(file.get_string("experiment", "family"));
  if (cfg.family == MatrixFamily::kIidGaussian || cfg.family == MatrixFamily::kIdentity) {
    if (file.has("experiment", "sweep"))
      cfg.sweep = file.get_doubles("experiment", "sweep");
    else
      cfg.sweep = {0.0};
  } else {
    cfg.sweep = file.get_doubles("experiment", "sweep");
  }
  cfg.n = Index(file.get_int_or("experiment", "n", cfg.n));
  cfg.m = Index(file.get_int_or("experiment", "m", cfg.m));
  cfg.rho = file.get_double_or("experiment", "rho", cfg.rho);
  cfg.sigma2_x = file.get_double_or("experiment", "sigma2_x", cfg.sigma2_x);
  cfg.snr_db = file.get_double_or("experiment", "snr_db", cfg.snr_db);
  cfg.noiseless = file.get_bool_or("experiment", "noiseless", false);
  cfg.trials = int(file.get_int_or("experiment", "trials", cfg.trials));
  if (file.has("experiment", "algorithms")) {
    cfg.algorithms.clear();
    for (const auto& w : file.get_words("experiment", "algorithms"))
      cfg.algorithms.push_back(parse_algorithm(w));
  }
  cfg.seed = file.get_u64_or("experiment", "seed", cfg.seed);
  cfg.threads = int(file.get_int_or("experiment", "threads", 0));
  cfg.out_dir = file.get_string_or("experiment", "out_dir", "");

  cfg.max_iter = int(file.get_int_or("solver", "max_iter", cfg.max_iter));
  cfg.tol = file.get_double_or("solver", "tol", cfg.tol);
  cfg.damping = file.get_double_or("solver", "damping", cfg.damping);
  const std::string eps = file.get_string_or("solver", "eps_update", "closed_form");
  if (eps == "closed_form")
    cfg.eps_update = SblConfig::EpsUpdate::kClosedForm;
  else if (eps == "newton_iteration")
    cfg.eps_update = SblConfig::EpsUpdate::kNewton;
  else
    throw ConfigError("solver.eps_update must be closed_form or newton_iteration");

  file.ensure_fully_consumed();
  cfg.validate();
  return cfg;
}

void ExperimentConfig::apply_paper_scale() {
  n = 1000;
  m = 800;
}

MatrixSpec ExperimentConfig::matrix_spec(double sweep_value) const {
  MatrixSpec spec;
  spec.rows = m;
  spec.cols = n;
  switch (family) {
    case MatrixFamily::kIidGaussian: spec.kind = IidGaussian{}; break;
    case MatrixFamily::kIdentity: spec.kind = Identity{}; break;
    case MatrixFamily::kIllConditioned: spec.kind = IllConditioned{sweep_value}; break;
    case MatrixFamily::kCorrelated: spec.kind = Correlated{sweep_value}; break;
    case MatrixFamily::kNonzeroMean: spec.kind = NonzeroMean{sweep_value}; break;
    case MatrixFamily::kLowRank: {
      // The sweep value is the rank ratio R/N.
      const auto rank = Index(std::llround(sweep_value * double(n)));
      spec.kind = LowRank{rank};
      break;
    }
  }
  spec.validate();
  return spec;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("experiment.trials must be >= 1");
  if (sweep.empty()) throw ConfigError("experiment.sweep must be non-empty");
  if (algorithms.empty()) throw ConfigError("experiment.algorithms must be non-empty");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("experiment.rho must lie in [0, 1]");
  if (!(sigma2_x > 0.0)) throw ConfigError("experiment.sigma2_x must be positive");
  if (!(damping > 0.0 && damping <= 1.0))
    throw ConfigError("solver.damping must lie in (0, 1]");
  if (max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
  for (double v : sweep) (void)matrix_spec(v);  // family-domain check
}

namespace {

struct TrialOutcome {
  double ratio = kNaN;  // ||x_hat - x||^2 / ||x||^2; +inf when diverged
  double time_ms = 0.0;
  bool diverged = false;
};

double error_ratio(const Vector& x_hat, const Vector& x_ref) {
  if (!x_hat.allFinite()) return kInf;
  return (x_hat - x_ref).squaredNorm() / x_ref.squaredNorm();
}

/// Runs every configured algorithm on one seeded instance. The unitary
/// transform is computed once and its wall time billed to each algorithm
/// that consumes the transformed model.
std::vector<TrialOutcome> run_trial(const ExperimentConfig& cfg, double sweep_value,
                                    std::uint64_t instance_seed) {
  const SparseProblem prob = make_problem(cfg.matrix_spec(sweep_value), cfg.rho,
                                          cfg.sigma2_x,
                                          cfg.noiseless ? kInf : cfg.snr_db,
                                          instance_seed);
  const Vector& truth = prob.signal.values;

  const bool needs_transform =
      std::any_of(cfg.algorithms.begin(), cfg.algorithms.end(), [](Algorithm a) {
        return a == Algorithm::kUtamp || a == Algorithm::kUtampSbl;
      });
  TransformedModel tm;
  double svd_ms = 0.0;
  if (needs_transform) {
    const auto t0 = std::chrono::steady_clock::now();
    tm = unitary_transform(prob.a, prob.y);
    svd_ms = std::chrono::duration<double, std::milli>(
                 std::chrono::steady_clock::now() - t0).count();
  }

  std::vector<TrialOutcome> outcomes;
  outcomes.reserve(cfg.algorithms.size());
  for (Algorithm alg : cfg.algorithms) {
    TrialOutcome out;
    try {
      switch (alg) {
        case Algorithm::kAmp: {
          AmpOptions opts;
          opts.max_iter = cfg.max_iter;
          opts.tol = cfg.tol;
          opts.damping = cfg.damping;
          const DenoiserSpec prior = BernoulliGaussianPrior{cfg.rho, cfg.sigma2_x};
          RunResult r = amp_run(prob.a, prob.y, prior, prob.lambda_true, opts);
          out.ratio = r.diverged ? kInf : error_ratio(r.x_hat, truth);
          out.diverged = r.diverged;
          out.time_ms = r.wall_time_s * 1e3;
          break;
        }
        case Algorithm::kUtamp: {
          UtampOptions opts;
          opts.max_iter = cfg.max_iter;
          opts.tol = cfg.tol;
          const DenoiserSpec prior = BernoulliGaussianPrior{cfg.rho, cfg.sigma2_x};
          RunResult r = utamp_run(tm, prior, prob.lambda_true, opts);
          out.ratio = error_ratio(r.x_hat, truth);
          out.time_ms = r.wall_time_s * 1e3 + svd_ms;
          break;
        }
        case Algorithm::kUtampSbl: {
          SblConfig sc;
          sc.max_iter = cfg.max_iter;
          sc.tol = cfg.tol;
          sc.eps_update = cfg.eps_update;
          RunResult r = sbl_run(tm, sc);
          out.ratio = error_ratio(r.x_hat, truth);
          out.time_ms = r.wall_time_s * 1e3 + svd_ms;
          break;
        }
        case Algorithm::kOracle: {
          const auto t0 = std::chrono::steady_clock::now();
          OracleResult r = oracle_mmse(prob.a, prob.y, prob.signal.support,
                                       prob.lambda_true, prob.signal.sigma2_x);
          out.time_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0).count();
          out.ratio = error_ratio(r.x_hat_oracle, truth);
          break;
        }
      }
    } catch (const NumericError&) {
      out.ratio = kInf;
      out.diverged = true;
    }
    outcomes.push_back(out);
  }
  return outcomes;
}

}  // namespace

std::vector<SweepRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int sweeps = int(cfg.sweep.size());
  const int trials = cfg.trials;

  // outcomes[sweep][trial][alg], each task owning one (sweep, trial) cell.
  std::vector<std::vector<std::vector<TrialOutcome>>> outcomes(
      static_cast<size_t>(sweeps),
      std::vector<std::vector<TrialOutcome>>(static_cast<size_t>(trials)));

  std::atomic<int> next{0};
  const int total = sweeps * trials;
  auto worker = [&] {
    for (int task = next.fetch_add(1); task < total; task = next.fetch_add(1)) {
      const int si = task / trials;
      const int ti = task % trials;
      const std::uint64_t seed_base = mix_seed(cfg.seed, std::uint64_t(si));
      outcomes[size_t(si)][size_t(ti)] =
          run_trial(cfg, cfg.sweep[size_t(si)], mix_seed(seed_base, std::uint64_t(ti)));
    }
  };

  int nthreads = cfg.threads > 0 ? cfg.threads
                                 : int(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, total));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(size_t(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Single-writer aggregation in (sweep, alg, trial) order.
  std::vector<SweepRow> rows;
  for (int si = 0; si < sweeps; ++si) {
    for (size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
      SweepRow row;
      row.family = to_string(cfg.family);
      row.sweep_value = cfg.sweep[size_t(si)];
      row.alg = to_string(cfg.algorithms[ai]);
      row.trials = trials;
      row.seed_base = mix_seed(cfg.seed, std::uint64_t(si));
      double ratio_sum = 0.0, time_sum = 0.0;
      int diverged = 0;
      for (int ti = 0; ti < trials; ++ti) {
        const TrialOutcome& out = outcomes[size_t(si)][size_t(ti)][ai];
        ratio_sum += out.ratio;
        time_sum += out.time_ms;
        diverged += out.diverged ? 1 : 0;
      }
      const double mean_ratio = ratio_sum / double(trials);
      row.nmse_db = mean_ratio == 0.0 ? -kInf : 10.0 * std::log10(mean_ratio);
      row.time_ms = time_sum / double(trials);
      row.diverged_frac = double(diverged) / double(trials);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

SweepRow regenerate_row(const ExperimentConfig& cfg, const SweepRow& row) {
  ExperimentConfig one = cfg;
  one.family = parse_family(row.family);
  one.sweep = {row.sweep_value};
  one.algorithms = {parse_algorithm(row.alg)};
  one.trials = row.trials;

  SweepRow out;
  out.family = row.family;
  out.sweep_value = row.sweep_value;
  out.alg = row.alg;
  out.trials = row.trials;
  out.seed_base = row.seed_base;
  double ratio_sum = 0.0, time_sum = 0.0;
  int diverged = 0;
  for (int ti = 0; ti < row.trials; ++ti) {
    const auto outcome =
        run_trial(one, row.sweep_value, mix_seed(row.seed_base, std::uint64_t(ti)));
    ratio_sum += outcome[0].ratio;
    time_sum += outcome[0].time_ms;
    diverged += outcome[0].diverged ? 1 : 0;
  }
  const double mean_ratio = ratio_sum / double(row.trials);
  out.nmse_db = mean_ratio == 0.0 ? -kInf : 10.0 * std::log10(mean_ratio);
  out.time_ms = time_sum / double(row.trials);
  out.diverged_frac = double(diverged) / double(row.trials);
  return out;
}

namespace {

double floor_nmse(double v) { return std::isnan(v) ? v : std::max(v, kNmseFloorDb); }

}  // namespace

void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "family,sweep,alg,trials,nmse_db,time_ms,diverged_frac,seed\n";
  for (const auto& r : rows) {
    out << r.family << ',' << format_double(r.sweep_value) << ',' << r.alg << ','
        << r.trials << ',' << format_double(floor_nmse(r.nmse_db)) << ','
        << format_double(r.time_ms) << ',' << format_double(r.diverged_frac) << ','
        << r.seed_base << '\n';
  }
}

void write_rows_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_rows_csv(f, rows);
}

std::vector<SweepRow> read_rows_csv(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  if (!std::getline(in, line) ||
      line != "family,sweep,alg,trials,nmse_db,time_ms,diverged_frac,seed")
    throw std::runtime_error("rows csv: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    SweepRow r;
    auto next_field = [&]() -> std::string {
      if (!std::getline(ls, field, ',')) throw std::runtime_error("rows csv: short row");
      return field;
    };
    r.family = next_field();
    r.sweep_value = std::stod(next_field());
    r.alg = next_field();
    r.trials = std::stoi(next_field());
    r.nmse_db = std::stod(next_field());
    r.time_ms = std::stod(next_field());
    r.diverged_frac = std::stod(next_field());
    r.seed_base = std::stoull(next_field());
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SweepRow> read_rows_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_rows_csv(f);
}

}  // namespace sblkit

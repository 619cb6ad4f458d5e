#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sblkit/harness.hpp"
#include "sblkit/plot.hpp"
#include "sblkit/rng.hpp"
#include "sblkit/sbl.hpp"
#include "sblkit/transform.hpp"

using namespace sblkit;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.family = MatrixFamily::kIllConditioned;
  cfg.sweep = {1.0, 100.0};
  cfg.n = 40;
  cfg.m = 32;
  cfg.rho = 0.2;
  cfg.snr_db = 40.0;
  cfg.trials = 3;
  cfg.algorithms = {Algorithm::kUtampSbl, Algorithm::kOracle};
  cfg.seed = 7;
  cfg.threads = 1;
  cfg.max_iter = 100;
  return cfg;
}

// Strips the time_ms column (index 5) from a serialized CSV row.
std::string deterministic_fields(const SweepRow& row) {
  std::ostringstream out;
  std::vector<SweepRow> one{row};
  write_rows_csv(out, one);
  std::istringstream in(out.str());
  std::string header, line, field, rebuilt;
  std::getline(in, header);
  std::getline(in, line);
  std::istringstream ls(line);
  for (int i = 0; std::getline(ls, field, ','); ++i)
    if (i != 5) rebuilt += field + "|";
  return rebuilt;
}

}  // namespace

TEST_CASE("ExperimentConfig::from_config parses and rejects unknown keys") {
  const ConfigFile good = ConfigFile::parse_string(
      "[experiment]\n"
      "family = correlated\n"
      "sweep = 0.1 0.3 0.5\n"
      "n = 100\n"
      "m = 80\n"
      "rho = 0.15\n"
      "trials = 4\n"
      "algorithms = amp utamp-sbl oracle\n"
      "seed = 99\n"
      "[solver]\n"
      "max_iter = 150\n"
      "damping = 0.9\n");
  const ExperimentConfig cfg = ExperimentConfig::from_config(good);
  CHECK(cfg.family == MatrixFamily::kCorrelated);
  CHECK(cfg.sweep == std::vector<double>{0.1, 0.3, 0.5});
  CHECK(cfg.n == 100);
  CHECK(cfg.trials == 4);
  CHECK(cfg.algorithms.size() == 3);
  CHECK(cfg.seed == 99);
  CHECK(cfg.max_iter == 150);
  CHECK(cfg.damping == 0.9);

  const ConfigFile bad = ConfigFile::parse_string(
      "[experiment]\n"
      "family = correlated\n"
      "sweep = 0.1\n"
      "not_a_key = 1\n");
  CHECK_THROWS_AS(ExperimentConfig::from_config(bad), ConfigError);

  const ConfigFile badval = ConfigFile::parse_string(
      "[experiment]\n"
      "family = correlated\n"
      "sweep = 0.1 2.0\n");  // c = 2 outside [0, 1)
  CHECK_THROWS_AS(ExperimentConfig::from_config(badval), std::invalid_argument);
}

TEST_CASE("paper scale flag restores N = 1000, M = 800") {
  ExperimentConfig cfg = tiny_config();
  cfg.apply_paper_scale();
  CHECK(cfg.n == 1000);
  CHECK(cfg.m == 800);
}

TEST_CASE("run_experiment: identity + noiseless single row lands below -100 dB") {
  ExperimentConfig cfg;
  cfg.family = MatrixFamily::kIdentity;
  cfg.sweep = {0.0};
  cfg.n = 64;
  cfg.m = 64;
  cfg.rho = 0.1;
  cfg.noiseless = true;
  cfg.trials = 1;
  cfg.algorithms = {Algorithm::kUtampSbl};
  cfg.seed = 5;
  cfg.threads = 1;
  const auto rows = run_experiment(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].nmse_db <= -100.0);
  CHECK(rows[0].diverged_frac == 0.0);
}

TEST_CASE("run_experiment: aggregation equals a naive ratio-average reference") {
  const ExperimentConfig cfg = tiny_config();
  const auto rows = run_experiment(cfg);
  REQUIRE(rows.size() == 4);  // 2 sweep values x 2 algorithms

  // naive reference for the utamp-sbl row at sweep index 1
  const SweepRow& row = rows[2];
  REQUIRE(row.alg == "utamp-sbl");
  double ratio_sum = 0.0;
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t trial_seed = mix_seed(row.seed_base, std::uint64_t(t));
    const SparseProblem p = make_problem(cfg.matrix_spec(row.sweep_value), cfg.rho,
                                         cfg.sigma2_x, cfg.snr_db, trial_seed);
    SblConfig sc;
    sc.max_iter = cfg.max_iter;
    sc.tol = cfg.tol;
    const RunResult res = sbl_run(unitary_transform(p.a, p.y), sc);
    ratio_sum += (res.x_hat - p.signal.values).squaredNorm() /
                 p.signal.values.squaredNorm();
  }
  const double naive = 10.0 * std::log10(ratio_sum / cfg.trials);
  CHECK(std::abs(naive - row.nmse_db) < 1e-12);
}

TEST_CASE("run_experiment: rows are deterministic and thread-count independent") {
  ExperimentConfig cfg = tiny_config();
  const auto rows1 = run_experiment(cfg);
  cfg.threads = 2;
  const auto rows2 = run_experiment(cfg);
  REQUIRE(rows1.size() == rows2.size());
  for (size_t i = 0; i < rows1.size(); ++i)
    CHECK(deterministic_fields(rows1[i]) == deterministic_fields(rows2[i]));
}

TEST_CASE("regenerate_row reproduces every deterministic field") {
  const ExperimentConfig cfg = tiny_config();
  const auto rows = run_experiment(cfg);
  for (const auto& row : rows) {
    const SweepRow regen = regenerate_row(cfg, row);
    CHECK(deterministic_fields(regen) == deterministic_fields(row));
  }
}

TEST_CASE("rows CSV round-trip and -inf flooring") {
  SweepRow r;
  r.family = "identity";
  r.sweep_value = 0.0;
  r.alg = "utamp-sbl";
  r.trials = 1;
  r.nmse_db = -kInf;
  r.time_ms = 1.5;
  r.diverged_frac = 0.0;
  r.seed_base = 42;
  std::stringstream buf;
  write_rows_csv(buf, {r});
  const auto rows = read_rows_csv(buf);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].nmse_db == kNmseFloorDb);  // sentinel capped in the CSV
  CHECK(rows[0].seed_base == 42);
  CHECK(rows[0].family == "identity");

  std::stringstream bad("not,a,header\n");
  CHECK_THROWS(read_rows_csv(bad));
}

TEST_CASE("render_plot_svg: structure, clipping note, determinism") {
  std::vector<SweepRow> rows;
  for (double sweep : {1.0, 10.0, 100.0, 1000.0}) {
    for (const char* alg : {"utamp-sbl", "oracle"}) {
      SweepRow r;
      r.family = "ill_conditioned";
      r.sweep_value = sweep;
      r.alg = alg;
      r.trials = 5;
      r.nmse_db = alg == std::string("oracle") ? -55.0 - sweep * 1e-3 : -50.0;
      r.seed_base = 1;
      rows.push_back(r);
    }
  }
  const std::string svg = render_plot_svg(rows, {});
  size_t polylines = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++polylines;
    pos += 1;
  }
  CHECK(polylines == 2);
  // 4 points per polyline: count coordinate pairs
  const size_t first = svg.find("points=\"");
  const size_t end = svg.find('"', first + 8);
  const std::string pts = svg.substr(first + 8, end - first - 8);
  CHECK(std::count(pts.begin(), pts.end(), ',') == 4);

  CHECK(svg.find("clipped") == std::string::npos);
  rows[0].nmse_db = -kInf;  // sentinel row forces the footnote
  const std::string svg2 = render_plot_svg(rows, {});
  CHECK(svg2.find("note: values clipped") != std::string::npos);

  // byte-identical regeneration
  CHECK(render_plot_svg(rows, {}) == svg2);

  CHECK_THROWS_AS(render_plot_svg({}, {}), std::invalid_argument);
  rows[1].family = "correlated";
  CHECK_THROWS_AS(render_plot_svg(rows, {}), std::invalid_argument);
}

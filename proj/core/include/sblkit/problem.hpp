#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "sblkit/types.hpp"

namespace sblkit {

/// Bernoulli-Gaussian vector: each entry is zero with probability 1-rho and
/// N(0, sigma2_x) otherwise.
struct SparseSignal {
  Vector values;               // length n
  std::vector<Index> support;  // sorted indices of the nonzero entries
  double rho = 0.0;
  double sigma2_x = 1.0;
};

// Measurement-matrix families. The last four are the "difficult" deviations
// from an i.i.d. zero-mean Gaussian matrix; `Identity` exists for smoke tests.
struct IidGaussian {};
struct Identity {};
struct IllConditioned {
  double kappa = 1.0;  // condition number, >= 1
};
struct Correlated {
  double c = 0.0;  // correlation parameter in [0, 1)
};
struct NonzeroMean {
  double mu = 0.0;  // entry mean, >= 0; entries ~ N(mu, 1/n)
};
struct LowRank {
  Index rank = 1;  // 1 <= rank < rows
};

using MatrixKind = std::variant<IidGaussian, Identity, IllConditioned,
                                Correlated, NonzeroMean, LowRank>;

struct MatrixSpec {
  Index rows = 0;
  Index cols = 0;
  MatrixKind kind = IidGaussian{};

  /// Throws std::invalid_argument if the spec is infeasible.
  void validate() const;
};

/// A complete synthetic instance of y = A x + w.
struct SparseProblem {
  Matrix a;
  Vector y;
  SparseSignal signal;
  double lambda_true = kInf;  // noise precision; +inf means noiseless
  double snr_db = kInf;
};

/// Draws a Bernoulli-Gaussian signal. Deterministic given the seed.
SparseSignal gen_signal(Index n, double rho, double sigma2_x, std::uint64_t seed);

/// Draws a measurement matrix of the requested family.
Matrix gen_matrix(const MatrixSpec& spec, std::uint64_t seed);

struct Synthesized {
  Vector y;
  double lambda_true;  // +inf when snr_db is +inf
};

/// Adds Gaussian noise calibrated so the realized SNR equals snr_db exactly:
/// noise variance = ||A x||^2 / (m * 10^(snr_db/10)). snr_db = +inf yields
/// w = 0. Throws when A x == 0 and a finite SNR is requested.
Synthesized synthesize(const Matrix& a, const Vector& x, double snr_db,
                       std::uint64_t seed);

/// Draws matrix, signal, and noise for one instance. Sub-seeds for the three
/// draws are derived from `seed` with fixed stream ids, so one seed pins the
/// whole instance.
SparseProblem make_problem(const MatrixSpec& spec, double rho, double sigma2_x,
                           double snr_db, std::uint64_t seed);

/// 10 log10(||x_hat - x||^2 / ||x||^2). Returns -inf when x_hat == x.
/// Throws on length mismatch or when the reference is the zero vector.
double nmse_db(const Vector& x_hat, const Vector& x_ref);

/// Floor applied to NMSE values written to CSV and plots (the -inf sentinel).
inline constexpr double kNmseFloorDb = -320.0;

}  // namespace sblkit

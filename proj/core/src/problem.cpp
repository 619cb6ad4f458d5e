#include "sblkit/problem.hpp"

#include <Eigen/QR>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "sblkit/rng.hpp"

namespace sblkit {

namespace {

// Fills column-major, so the draw order is part of the format.
Matrix standard_gaussian(Index rows, Index cols, Rng& rng) {
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) a(i, j) = rng.normal();
  return a;
}

Matrix orthonormal_factor(Index n, Rng& rng) {
  Matrix g = standard_gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

// Symmetric square root of an SPD matrix via eigendecomposition.
Matrix symmetric_sqrt(const Matrix& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  if (es.info() != Eigen::Success)
    throw NumericError("eigendecomposition failed in symmetric_sqrt");
  Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Matrix kms_toeplitz(Index n, double c) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = std::pow(c, std::abs(double(i - j)));
  return m;
}

}  // namespace

void MatrixSpec::validate() const {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("matrix spec: dimensions must be positive");
  if (std::holds_alternative<Identity>(kind) && rows != cols)
    throw std::invalid_argument("matrix spec: identity requires rows == cols");
  if (const auto* ill = std::get_if<IllConditioned>(&kind)) {
    if (!(ill->kappa >= 1.0))
      throw std::invalid_argument("matrix spec: kappa must be >= 1");
    if (rows < 2 && ill->kappa != 1.0)
      throw std::invalid_argument("matrix spec: ill-conditioned needs rows >= 2");
  }
  if (const auto* corr = std::get_if<Correlated>(&kind)) {
    // c = 1 makes C_L/C_R singular; the sweep range endpoint is rejected.
    if (!(corr->c >= 0.0 && corr->c < 1.0))
      throw std::invalid_argument("matrix spec: c must lie in [0, 1)");
  }
  if (const auto* nzm = std::get_if<NonzeroMean>(&kind)) {
    if (!(nzm->mu >= 0.0))
      throw std::invalid_argument("matrix spec: mu must be >= 0");
  }
  if (const auto* lr = std::get_if<LowRank>(&kind)) {
    if (lr->rank < 1 || lr->rank >= rows)
      throw std::invalid_argument("matrix spec: rank must satisfy 1 <= R < rows");
  }
}

SparseSignal gen_signal(Index n, double rho, double sigma2_x, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_signal: n must be >= 1");
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("gen_signal: rho must lie in [0, 1]");
  if (!(sigma2_x > 0.0))
    throw std::invalid_argument("gen_signal: sigma2_x must be positive");

  Rng rng(seed);
  SparseSignal sig;
  sig.values = Vector::Zero(n);
  sig.rho = rho;
  sig.sigma2_x = sigma2_x;
  const double sd = std::sqrt(sigma2_x);
  for (Index i = 0; i < n; ++i) {
    if (rng.uniform() < rho) {
      double v = sd * rng.normal();
      while (v == 0.0) v = sd * rng.normal();  // support entries must be nonzero
      sig.values[i] = v;
      sig.support.push_back(i);
    }
  }
  return sig;
}

Matrix gen_matrix(const MatrixSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Index m = spec.rows, n = spec.cols;
  Rng rng(seed);

  return std::visit(
      [&](const auto& kind) -> Matrix {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, IidGaussian>) {
          return standard_gaussian(m, n, rng);
        } else if constexpr (std::is_same_v<K, Identity>) {
          return Matrix::Identity(m, n);
        } else if constexpr (std::is_same_v<K, IllConditioned>) {
          // A = U L V with geometric singular values, sigma_max = 1, so
          // L(i,i)/L(i+1,i+1) = kappa^(1/(m-1)) and cond(A) = kappa for m <= n.
          Matrix u = orthonormal_factor(m, rng);
          Matrix v = orthonormal_factor(n, rng);
          const Index k = std::min(m, n);
          Matrix lv = Matrix::Zero(m, n);
          const double expo = (m > 1) ? 1.0 / double(m - 1) : 0.0;
          for (Index i = 0; i < k; ++i)
            lv.row(i) = std::pow(kind.kappa, -double(i) * expo) * v.row(i);
          return u * lv;
        } else if constexpr (std::is_same_v<K, Correlated>) {
          Matrix g = standard_gaussian(m, n, rng);
          if (kind.c == 0.0) return g;  // C_L = C_R = I exactly
          Matrix sl = symmetric_sqrt(kms_toeplitz(m, kind.c));
          Matrix sr = symmetric_sqrt(kms_toeplitz(n, kind.c));
          return sl * g * sr;
        } else if constexpr (std::is_same_v<K, NonzeroMean>) {
          const double sd = 1.0 / std::sqrt(double(n));
          Matrix a(m, n);
          for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < m; ++i) a(i, j) = kind.mu + sd * rng.normal();
          return a;
        } else {
          static_assert(std::is_same_v<K, LowRank>);
          Matrix b = standard_gaussian(m, kind.rank, rng);
          Matrix c = standard_gaussian(kind.rank, n, rng);
          return b * c;
        }
      },
      spec.kind);
}

Synthesized synthesize(const Matrix& a, const Vector& x, double snr_db,
                       std::uint64_t seed) {
  if (a.cols() != x.size())
    throw std::invalid_argument("synthesize: dimension mismatch");
  Vector ax = a * x;
  if (std::isinf(snr_db)) return {std::move(ax), kInf};

  const double signal_power = ax.squaredNorm();
  if (signal_power == 0.0)
    throw std::invalid_argument("synthesize: A x = 0, finite SNR is unreachable");

  // Per-realization calibration: the drawn ||A x||^2 sets the noise variance.
  const double m = double(a.rows());
  const double noise_var = signal_power / (m * std::pow(10.0, snr_db / 10.0));
  const double sd = std::sqrt(noise_var);
  Rng rng(seed);
  for (Index i = 0; i < ax.size(); ++i) ax[i] += sd * rng.normal();
  return {std::move(ax), 1.0 / noise_var};
}

SparseProblem make_problem(const MatrixSpec& spec, double rho, double sigma2_x,
                           double snr_db, std::uint64_t seed) {
  SparseProblem p;
  p.signal = gen_signal(spec.cols, rho, sigma2_x, mix_seed(seed, 1));
  p.a = gen_matrix(spec, mix_seed(seed, 2));
  auto syn = synthesize(p.a, p.signal.values, snr_db, mix_seed(seed, 3));
  p.y = std::move(syn.y);
  p.lambda_true = syn.lambda_true;
  p.snr_db = snr_db;
  return p;
}

double nmse_db(const Vector& x_hat, const Vector& x_ref) {
  if (x_hat.size() != x_ref.size())
    throw std::invalid_argument("nmse_db: length mismatch");
  const double ref = x_ref.squaredNorm();
  if (ref == 0.0) throw std::invalid_argument("nmse_db: zero reference vector");
  const double err = (x_hat - x_ref).squaredNorm();
  if (err == 0.0) return -kInf;
  return 10.0 * std::log10(err / ref);
}

}  // namespace sblkit

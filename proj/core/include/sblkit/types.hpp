#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sblkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Thrown when an iterative solver or a decomposition produces non-finite
/// state. `iteration()` is -1 when the failure is not tied to a loop index.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg, int iteration = -1)
      : std::runtime_error(iteration >= 0
                               ? msg + " (iteration " + std::to_string(iteration) + ")"
                               : msg),
        iteration_(iteration) {}

  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// Outcome of a single solver run (AMP, UTAMP, or UTAMP-SBL).
struct RunResult {
  Vector x_hat;
  std::vector<double> nmse_trajectory_db;  // one entry per completed iteration,
                                           // filled only when truth is supplied
  int iterations = 0;
  bool converged = false;  // stopped via the relative-change tolerance
  bool diverged = false;   // state norm blew up or went non-finite (AMP only)
  double wall_time_s = 0.0;
  double damping = 1.0;    // damping factor the run used
  double lambda_hat_final = kNaN;  // SBL runs only
  double eps_hat_final = kNaN;     // SBL runs only
};

}  // namespace sblkit

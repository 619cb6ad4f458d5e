#pragma once

#include <iosfwd>
#include <string>

#include "sblkit/problem.hpp"

namespace sblkit {

// Binary problem container, version 1. Layout (all integers and floats
// little-endian):
//   bytes 0..7   magic "SBLPROB1"
//   u32          format version (1)
//   u64 m, u64 n, u64 k          dimensions and support size
//   f64 snr_db, f64 lambda_true, f64 rho, f64 sigma2_x
//   f64[m*n]     A, column-major
//   f64[m]       y
//   f64[n]       x
//   u64[k]       support indices, ascending
void save_problem(std::ostream& out, const SparseProblem& p);
void save_problem(const std::string& path, const SparseProblem& p);
SparseProblem load_problem(std::istream& in);
SparseProblem load_problem(const std::string& path);

/// Long-format CSV dump of the same instance (kind,i,j,value rows) for
/// eyeballing and spreadsheet import.
void write_problem_csv(std::ostream& out, const SparseProblem& p);
void write_problem_csv(const std::string& path, const SparseProblem& p);

/// Shortest decimal form that round-trips an IEEE double ("%.17g").
std::string format_double(double v);

}  // namespace sblkit

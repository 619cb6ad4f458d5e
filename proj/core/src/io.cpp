#include "sblkit/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sblkit {

namespace {

constexpr char kMagic[8] = {'S', 'B', 'L', 'P', 'R', 'O', 'B', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = char((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = char((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("problem container: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("problem container: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_problem(std::ostream& out, const SparseProblem& p) {
  out.write(kMagic, 8);
  put_u32(out, kVersion);
  put_u64(out, std::uint64_t(p.a.rows()));
  put_u64(out, std::uint64_t(p.a.cols()));
  put_u64(out, std::uint64_t(p.signal.support.size()));
  put_f64(out, p.snr_db);
  put_f64(out, p.lambda_true);
  put_f64(out, p.signal.rho);
  put_f64(out, p.signal.sigma2_x);
  for (Index j = 0; j < p.a.cols(); ++j)
    for (Index i = 0; i < p.a.rows(); ++i) put_f64(out, p.a(i, j));
  for (Index i = 0; i < p.y.size(); ++i) put_f64(out, p.y[i]);
  for (Index i = 0; i < p.signal.values.size(); ++i) put_f64(out, p.signal.values[i]);
  for (Index idx : p.signal.support) put_u64(out, std::uint64_t(idx));
  if (!out) throw std::runtime_error("problem container: write failed");
}

void save_problem(const std::string& path, const SparseProblem& p) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  save_problem(f, p);
}

SparseProblem load_problem(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("problem container: bad magic");
  if (get_u32(in) != kVersion)
    throw std::runtime_error("problem container: unsupported version");

  const auto m = Index(get_u64(in));
  const auto n = Index(get_u64(in));
  const auto k = Index(get_u64(in));
  if (m < 1 || n < 1 || k < 0 || k > n)
    throw std::runtime_error("problem container: bad dimensions");

  SparseProblem p;
  p.snr_db = get_f64(in);
  p.lambda_true = get_f64(in);
  p.signal.rho = get_f64(in);
  p.signal.sigma2_x = get_f64(in);
  p.a.resize(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) p.a(i, j) = get_f64(in);
  p.y.resize(m);
  for (Index i = 0; i < m; ++i) p.y[i] = get_f64(in);
  p.signal.values.resize(n);
  for (Index i = 0; i < n; ++i) p.signal.values[i] = get_f64(in);
  p.signal.support.resize(size_t(k));
  for (Index i = 0; i < k; ++i) {
    const auto idx = Index(get_u64(in));
    if (idx < 0 || idx >= n)
      throw std::runtime_error("problem container: support index out of range");
    p.signal.support[size_t(i)] = idx;
  }
  return p;
}

SparseProblem load_problem(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return load_problem(f);
}

void write_problem_csv(std::ostream& out, const SparseProblem& p) {
  out << "kind,i,j,value\n";
  out << "meta,m,," << p.a.rows() << "\n";
  out << "meta,n,," << p.a.cols() << "\n";
  out << "meta,rho,," << format_double(p.signal.rho) << "\n";
  out << "meta,sigma2_x,," << format_double(p.signal.sigma2_x) << "\n";
  out << "meta,snr_db,," << format_double(p.snr_db) << "\n";
  out << "meta,lambda_true,," << format_double(p.lambda_true) << "\n";
  for (Index i = 0; i < p.y.size(); ++i)
    out << "y," << i << ",," << format_double(p.y[i]) << "\n";
  for (Index i = 0; i < p.signal.values.size(); ++i)
    out << "x," << i << ",," << format_double(p.signal.values[i]) << "\n";
  for (Index idx : p.signal.support) out << "support," << idx << ",,1\n";
  for (Index j = 0; j < p.a.cols(); ++j)
    for (Index i = 0; i < p.a.rows(); ++i)
      out << "a," << i << "," << j << "," << format_double(p.a(i, j)) << "\n";
}

void write_problem_csv(const std::string& path, const SparseProblem& p) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_problem_csv(f, p);
}

}  // namespace sblkit

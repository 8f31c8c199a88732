/// \file common.hpp
/// \brief Scalar/index types, error types, dense-vector kernels and the seeded RNG.

#pragma once

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace pctk {

using index_t = std::int32_t;

/// Dense vector of 64-bit reals. Length must conform to the operator it is
/// used with; kernels check and throw on mismatch.
using DenseVector = std::vector<double>;

/// Base error type for the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A configuration problem tied to an options key. The CLI maps this to
/// exit code 1 and prints the offending key.
class ConfigError : public Error {
public:
  ConfigError(std::string key, const std::string& message)
      : Error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

namespace detail {

inline std::string strfmt(const char* fmt, ...)
#if defined(__GNUC__)
    __attribute__((format(printf, 1, 2)))
#endif
    ;

inline std::string strfmt(const char* fmt, ...) {
  std::va_list args;
  va_start(args, fmt);
  std::va_list args2;
  va_copy(args2, args);
  const int n = std::vsnprintf(nullptr, 0, fmt, args);
  va_end(args);
  std::string out(n > 0 ? static_cast<std::size_t>(n) : 0, '\0');
  if (n > 0) std::vsnprintf(out.data(), out.size() + 1, fmt, args2);
  va_end(args2);
  return out;
}

}  // namespace detail

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

// ---------------------------------------------------------------------------
// Level-1 kernels on DenseVector
// ---------------------------------------------------------------------------

inline double dot(const DenseVector& x, const DenseVector& y) {
  require(x.size() == y.size(), "dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const DenseVector& x) { return std::sqrt(dot(x, x)); }

/// y += a*x
inline void axpy(double a, const DenseVector& x, DenseVector& y) {
  require(x.size() == y.size(), "axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scal(double a, DenseVector& x) {
  for (double& v : x) v *= a;
}

inline bool all_finite(const DenseVector& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Seeded random stream
// ---------------------------------------------------------------------------

/// SplitMix64 generator. Every randomized artifact (forcing terms, demo
/// fixtures) draws from this stream so that output files are byte-identical
/// across platforms and runs for a fixed seed.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [-1, 1).
  double next_pm1() { return 2.0 * next_unit() - 1.0; }

private:
  std::uint64_t state_;
};

}  // namespace pctk

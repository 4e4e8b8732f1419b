#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slp {

/// Arbitrary-precision integer used for coefficients, exponents and degree
/// bounds. Coefficients of circuit-encoded polynomials can be doubly
/// exponential in the circuit size, so fixed-width arithmetic is never safe.
using Integer = boost::multiprecision::cpp_int;

/// Exact/randomized switch shared by the decision procedures.
enum class Mode { exact, randomized };

/// An expansion or enumeration outgrew its budget. This is always a definite
/// "too large at desk scale", never a wrong answer.
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed textual input (netlist, monomial, instance file).
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  explicit parse_error(const std::string& what)
      : std::runtime_error(what), line_(0) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Structural precondition violation: cycle, unknown variable, wrong gate
/// kind, non-monotone input to a monotone-only procedure, ...
class circuit_error : public std::runtime_error {
 public:
  explicit circuit_error(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministic splittable RNG (splitmix64 core). Randomized procedures
/// derive one child stream per trial, so results are reproducible for a fixed
/// seed no matter how trials are scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased uniform draw in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling over the largest multiple of n.
    const std::uint64_t limit = ~0ULL - ~0ULL % n;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  /// Uniform draw in [lo, hi] inclusive.
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }

  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

  /// Child stream indexed by `stream`, independent of draws made so far on
  /// either generator.
  Rng split(std::uint64_t stream) const {
    Rng child(state_ ^ (0x632be59bd9b4e019ULL * (stream + 1)));
    child.next();
    return child;
  }

 private:
  std::uint64_t state_;
};

}  // namespace slp

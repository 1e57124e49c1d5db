#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgectl {

using Complex = std::complex<double>;
using StateVector = std::vector<Complex>;
using RealVector = std::vector<double>;

/// Process exit codes shared by the CLI and the error hierarchy below.
enum class ExitCode : int {
  success = 0,
  config_error = 2,
  numerical_failure = 3,
  edge_states_missing = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Invalid parameters or configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ExitCode::config_error, what) {}
};

/// Non-finite state, eigensolver non-convergence, stability-guard trips.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ExitCode::numerical_failure, what) {}
};

class EdgeStateError : public Error {
 public:
  enum class Kind { not_found, ambiguous };
  EdgeStateError(Kind kind, const std::string& what)
      : Error(ExitCode::edge_states_missing, what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline Complex inner(std::span<const double> a, std::span<const Complex> b) {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm_squared(std::span<const Complex> v) {
  double acc = 0.0;
  for (const auto& c : v) acc += std::norm(c);
  return acc;
}

inline StateVector to_complex(std::span<const double> v) {
  return StateVector(v.begin(), v.end());
}

/// Site basis state |site>, with 1-based site index.
inline StateVector basis_state(std::size_t n, std::size_t site) {
  if (site < 1 || site > n) throw ConfigError("basis site out of range");
  StateVector v(n, Complex{0.0, 0.0});
  v[site - 1] = 1.0;
  return v;
}

}  // namespace edgectl

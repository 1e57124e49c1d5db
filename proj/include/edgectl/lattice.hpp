#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "edgectl/types.hpp"

namespace edgectl {

/// Exact rational modulation frequency. Stored reduced, denominator > 0.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 3;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// Period of cos(2*pi*alpha*i) in the site index.
  std::int64_t period() const { return den; }

  /// Parses "1/3" or an integer "2".
  static Rational parse(std::string_view text);
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Static AAH model parameters: N sites, hopping t, potential strength V,
/// modulation alpha and phase delta.
struct LatticeSpec {
  std::size_t sites = 29;
  double hopping = 1.0;
  double potential = 1.5;
  Rational alpha{1, 3};
  double phase = 2.0 * std::numbers::pi / 3.0;

  /// Throws ConfigError on N < 3 or non-positive hopping.
  void validate() const;

  /// On-site energy at 1-based site i: V cos(2 pi alpha i + delta).
  double onsite(std::size_t site) const;
};

/// Real symmetric tridiagonal single-excitation Hamiltonian in band form.
class HamiltonianMatrix {
 public:
  HamiltonianMatrix(RealVector diagonal, RealVector offdiagonal);

  std::size_t dimension() const { return diagonal_.size(); }
  const RealVector& diagonal() const { return diagonal_; }
  /// offdiagonal()[i] couples 0-based sites i and i+1.
  const RealVector& offdiagonal() const { return offdiagonal_; }

  /// out = H * in. Sizes must match dimension().
  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  StateVector apply(std::span<const Complex> in) const;

  /// Row-major N*N dense realization.
  std::vector<double> dense() const;
  double entry(std::size_t row, std::size_t col) const;

  /// Max absolute row sum.
  double inf_norm() const;
  double trace() const;

 private:
  RealVector diagonal_;
  RealVector offdiagonal_;
};

enum class Boundary { first, last };

/// Rank-1 projector |site><site| on one boundary site.
class ControlOperator {
 public:
  ControlOperator(std::size_t dimension, Boundary which);

  std::size_t dimension() const { return dimension_; }
  /// 1-based site index (1 or N).
  std::size_t site() const { return site_; }
  std::size_t index() const { return site_ - 1; }

  StateVector apply(std::span<const Complex> in) const;
  /// <a| H_k |b>
  Complex matrix_element(std::span<const Complex> a, std::span<const Complex> b) const {
    return std::conj(a[index()]) * b[index()];
  }
  std::vector<double> dense() const;

 private:
  std::size_t dimension_;
  std::size_t site_;
};

HamiltonianMatrix build_hamiltonian(const LatticeSpec& spec);
ControlOperator boundary_projector(const LatticeSpec& spec, Boundary which);

/// Accepts plain decimals and expressions like "2pi/3", "pi", "0.5pi", "-pi/2".
double parse_angle(std::string_view text);

}  // namespace edgectl

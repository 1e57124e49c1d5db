#include "edgectl/lattice.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace edgectl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, const char* what) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError(std::string("cannot parse ") + what + ": '" + std::string(text) + "'");
  return value;
}

std::int64_t parse_int(std::string_view text, const char* what) {
  text = trim(text);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError(std::string("cannot parse ") + what + ": '" + std::string(text) + "'");
  return value;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw ConfigError("alpha denominator must be nonzero");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const auto g = std::gcd(n, d);
  num = g ? n / g : n;
  den = g ? d / g : d;
}

Rational Rational::parse(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, "alpha"), 1);
  return Rational(parse_int(text.substr(0, slash), "alpha numerator"),
                  parse_int(text.substr(slash + 1), "alpha denominator"));
}

std::string Rational::str() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

void LatticeSpec::validate() const {
  if (sites < 3) throw ConfigError("lattice needs at least 3 sites, got " + std::to_string(sites));
  if (!(hopping > 0.0)) throw ConfigError("hopping amplitude must be positive");
  if (!std::isfinite(potential) || !std::isfinite(phase))
    throw ConfigError("potential and phase must be finite");
}

double LatticeSpec::onsite(std::size_t site) const {
  // Reduce alpha*i modulo 1 exactly before going to floating point, so the
  // period-q structure is reproduced bit-for-bit along the chain.
  const std::int64_t i = static_cast<std::int64_t>(site);
  const std::int64_t r = ((alpha.num * i) % alpha.den + alpha.den) % alpha.den;
  const double frac = static_cast<double>(r) / static_cast<double>(alpha.den);
  return potential * std::cos(2.0 * std::numbers::pi * frac + phase);
}

HamiltonianMatrix::HamiltonianMatrix(RealVector diagonal, RealVector offdiagonal)
    : diagonal_(std::move(diagonal)), offdiagonal_(std::move(offdiagonal)) {
  if (diagonal_.empty() || offdiagonal_.size() + 1 != diagonal_.size())
    throw ConfigError("tridiagonal band sizes are inconsistent");
}

void HamiltonianMatrix::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const std::size_t n = diagonal_.size();
  if (n == 1) {
    out[0] = diagonal_[0] * in[0];
    return;
  }
  out[0] = diagonal_[0] * in[0] + offdiagonal_[0] * in[1];
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = offdiagonal_[i - 1] * in[i - 1] + diagonal_[i] * in[i] + offdiagonal_[i] * in[i + 1];
  out[n - 1] = offdiagonal_[n - 2] * in[n - 2] + diagonal_[n - 1] * in[n - 1];
}

StateVector HamiltonianMatrix::apply(std::span<const Complex> in) const {
  StateVector out(in.size());
  apply(in, out);
  return out;
}

double HamiltonianMatrix::entry(std::size_t row, std::size_t col) const {
  if (row == col) return diagonal_[row];
  if (row + 1 == col) return offdiagonal_[row];
  if (col + 1 == row) return offdiagonal_[col];
  return 0.0;
}

std::vector<double> HamiltonianMatrix::dense() const {
  const std::size_t n = dimension();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m[i * n + i] = diagonal_[i];
    if (i + 1 < n) {
      m[i * n + i + 1] = offdiagonal_[i];
      m[(i + 1) * n + i] = offdiagonal_[i];
    }
  }
  return m;
}

double HamiltonianMatrix::inf_norm() const {
  const std::size_t n = dimension();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(diagonal_[i]);
    if (i > 0) row += std::abs(offdiagonal_[i - 1]);
    if (i + 1 < n) row += std::abs(offdiagonal_[i]);
    best = std::max(best, row);
  }
  return best;
}

double HamiltonianMatrix::trace() const {
  return std::accumulate(diagonal_.begin(), diagonal_.end(), 0.0);
}

ControlOperator::ControlOperator(std::size_t dimension, Boundary which)
    : dimension_(dimension), site_(which == Boundary::first ? 1 : dimension) {}

StateVector ControlOperator::apply(std::span<const Complex> in) const {
  StateVector out(dimension_, Complex{0.0, 0.0});
  out[index()] = in[index()];
  return out;
}

std::vector<double> ControlOperator::dense() const {
  std::vector<double> m(dimension_ * dimension_, 0.0);
  m[index() * dimension_ + index()] = 1.0;
  return m;
}

HamiltonianMatrix build_hamiltonian(const LatticeSpec& spec) {
  spec.validate();
  RealVector diag(spec.sites);
  for (std::size_t i = 0; i < spec.sites; ++i) diag[i] = spec.onsite(i + 1);
  RealVector off(spec.sites - 1, -spec.hopping);
  return HamiltonianMatrix(std::move(diag), std::move(off));
}

ControlOperator boundary_projector(const LatticeSpec& spec, Boundary which) {
  spec.validate();
  return ControlOperator(spec.sites, which);
}

double parse_angle(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ConfigError("empty angle");
  const auto pi_pos = text.find("pi");
  if (pi_pos == std::string_view::npos) return parse_double(text, "angle");

  // [coef]pi[/den]
  std::string_view coef_text = trim(text.substr(0, pi_pos));
  std::string_view rest = trim(text.substr(pi_pos + 2));
  double coef = 1.0;
  if (coef_text == "-") {
    coef = -1.0;
  } else if (!coef_text.empty() && coef_text != "+") {
    if (coef_text.back() == '*') coef_text.remove_suffix(1);
    coef = parse_double(coef_text, "angle coefficient");
  }
  double den = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw ConfigError("malformed angle '" + std::string(text) + "'");
    den = parse_double(rest.substr(1), "angle denominator");
    if (den == 0.0) throw ConfigError("angle denominator is zero");
  }
  return coef * std::numbers::pi / den;
}

}  // namespace edgectl

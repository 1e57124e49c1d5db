#include "edgectl/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace edgectl {

const char* to_string(LawKind kind) {
  switch (kind) {
    case LawKind::v1: return "v1";
    case LawKind::v2: return "v2";
    case LawKind::v3: return "v3";
  }
  return "?";
}

LawKind parse_law_kind(std::string_view text) {
  if (text == "v1" || text == "V1") return LawKind::v1;
  if (text == "v2" || text == "V2") return LawKind::v2;
  if (text == "v3" || text == "V3") return LawKind::v3;
  throw ConfigError("unknown law '" + std::string(text) + "' (expected v1, v2 or v3)");
}

POperator::POperator(std::shared_ptr<const SpectralDecomposition> basis, RealVector p_values,
                     std::size_t target)
    : basis_(std::move(basis)), p_values_(std::move(p_values)), target_(target) {
  if (!basis_) throw ConfigError("P operator needs a spectral basis");
  const std::size_t n = basis_->dimension();
  if (p_values_.size() != n) throw ConfigError("P operator needs one coefficient per eigenstate");
  if (target_ >= n) throw ConfigError("P target index out of range");
  row_first_.assign(n, 0.0);
  row_last_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const RealVector& v = basis_->eigenvectors[i];
    for (std::size_t j = 0; j < n; ++j) {
      row_first_[j] += p_values_[i] * v.front() * v[j];
      row_last_[j] += p_values_[i] * v.back() * v[j];
    }
  }
}

bool POperator::target_is_minimum() const {
  for (std::size_t i = 0; i < p_values_.size(); ++i)
    if (i != target_ && !(p_values_[target_] < p_values_[i])) return false;
  return true;
}

double POperator::expectation(std::span<const Complex> psi) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < p_values_.size(); ++i)
    acc += p_values_[i] * std::norm(inner(basis_->eigenvectors[i], psi));
  return acc;
}

Complex POperator::apply_row(Boundary k, std::span<const Complex> psi) const {
  return inner(boundary_row(k), psi);
}

std::vector<double> POperator::dense() const {
  const std::size_t n = p_values_.size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const RealVector& v = basis_->eigenvectors[i];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) m[r * n + c] += p_values_[i] * v[r] * v[c];
  }
  return m;
}

POperator POperator::shifted(double c) const {
  RealVector p = p_values_;
  for (double& x : p) x += c;
  return POperator(basis_, std::move(p), target_);
}

POperator build_p1(std::shared_ptr<const SpectralDecomposition> basis, std::size_t target,
                   double p_f) {
  if (!basis) throw ConfigError("P operator needs a spectral basis");
  if (target >= basis->dimension()) throw ConfigError("P target index out of range");
  RealVector p = basis->eigenvalues;
  p[target] = p_f;
  POperator op(std::move(basis), std::move(p), target);
  if (!op.target_is_minimum())
    throw ConfigError("p_f = " + std::to_string(p_f) +
                      " is not below every other P coefficient; the target would not be the "
                      "minimum of the Lyapunov function");
  return op;
}

POperator build_uniform_p(std::shared_ptr<const SpectralDecomposition> basis,
                          std::size_t target, double p, double p_f, bool require_ordering) {
  if (!basis) throw ConfigError("P operator needs a spectral basis");
  if (target >= basis->dimension()) throw ConfigError("P target index out of range");
  RealVector values(basis->dimension(), p);
  values[target] = p_f;
  if (require_ordering && !(p_f < p))
    throw ConfigError("uniform P requires p_f < p");
  return POperator(std::move(basis), std::move(values), target);
}

namespace {

void check_gains(const Gains& g) {
  for (double a : g)
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("control gains must be finite and >= 0");
}

// Im[e^{i arg z} w] with z = <psi|phi>, w = <phi|H_k|psi>; 0 when z == 0.
double phase_aligned_im(Complex z, Complex w) {
  const double mag = std::abs(z);
  if (mag == 0.0) return 0.0;
  return std::imag(z / mag * w);
}

}  // namespace

double control_field_v1(std::span<const Complex> psi, const V1Law& law, Boundary k) {
  const std::size_t s = k == Boundary::first ? 0 : psi.size() - 1;
  const Complex z = inner(psi, law.target);
  const Complex w = std::conj(law.target[s]) * psi[s];
  return law.gains[channel_index(k)] * phase_aligned_im(z, w);
}

double control_field_v2(std::span<const Complex> psi, const POperator& p, Boundary k,
                        double gain) {
  // <psi| i[|s><s|, P] |psi> = -2 Im(conj(psi_s) (P psi)_s) for real symmetric P.
  const std::size_t s = k == Boundary::first ? 0 : psi.size() - 1;
  const Complex x = std::conj(psi[s]) * p.apply_row(k, psi);
  const double commutator_expectation = -2.0 * std::imag(x);
  return -gain * commutator_expectation;
}

double control_field_v3(std::span<const Complex> psi, std::span<const Complex> edge_left,
                        std::span<const Complex> edge_right, Boundary k, double gain) {
  const std::size_t s = k == Boundary::first ? 0 : psi.size() - 1;
  double sum = 0.0;
  for (auto edge : {edge_left, edge_right}) {
    const Complex z = inner(psi, edge);
    const Complex w = std::conj(edge[s]) * psi[s];
    sum += phase_aligned_im(z, w);
  }
  return gain * sum;
}

double control_field_v3(std::span<const Complex> psi, const EdgePair& pair, Boundary k,
                        double gain) {
  const StateVector left = to_complex(pair.left_state);
  const StateVector right = to_complex(pair.right_state);
  return control_field_v3(psi, left, right, k, gain);
}

ControlLaw::ControlLaw(Variant law) : law_(std::move(law)) {
  check_gains(gains());
  std::visit(
      [](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, V1Law>) {
          if (l.target.empty()) throw ConfigError("V1 law needs a target state");
        } else if constexpr (std::is_same_v<T, V2Law>) {
          if (!l.p) throw ConfigError("V2 law needs a P operator");
        } else {
          if (l.edge_left.size() != l.edge_right.size() || l.edge_left.empty())
            throw ConfigError("V3 law needs two edge states of equal dimension");
        }
      },
      law_);
}

ControlLaw ControlLaw::v1(StateVector target, Gains gains) {
  return ControlLaw(V1Law{gains, std::move(target)});
}

ControlLaw ControlLaw::v2(POperator p, Gains gains) {
  return ControlLaw(V2Law{gains, std::make_shared<const POperator>(std::move(p))});
}

ControlLaw ControlLaw::v3(const EdgePair& pair, Gains gains) {
  return ControlLaw(V3Law{gains, to_complex(pair.left_state), to_complex(pair.right_state)});
}

LawKind ControlLaw::kind() const {
  return static_cast<LawKind>(law_.index());
}

const Gains& ControlLaw::gains() const {
  return std::visit([](const auto& l) -> const Gains& { return l.gains; }, law_);
}

std::size_t ControlLaw::dimension() const {
  return std::visit(
      [](const auto& l) -> std::size_t {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, V1Law>) return l.target.size();
        else if constexpr (std::is_same_v<T, V2Law>) return l.p->p_values().size();
        else return l.edge_left.size();
      },
      law_);
}

double ControlLaw::lyapunov(std::span<const Complex> psi) const {
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, V1Law>) {
          return 1.0 - std::norm(inner(l.target, psi));
        } else if constexpr (std::is_same_v<T, V2Law>) {
          return l.p->expectation(psi);
        } else {
          return 1.0 - std::norm(inner(l.edge_left, psi)) - std::norm(inner(l.edge_right, psi));
        }
      },
      law_);
}

FieldPair ControlLaw::fields(std::span<const Complex> psi) const {
  return std::visit(
      [&](const auto& l) -> FieldPair {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, V1Law>) {
          return {control_field_v1(psi, l, Boundary::first),
                  control_field_v1(psi, l, Boundary::last)};
        } else if constexpr (std::is_same_v<T, V2Law>) {
          return {control_field_v2(psi, *l.p, Boundary::first, l.gains[0]),
                  control_field_v2(psi, *l.p, Boundary::last, l.gains[1])};
        } else {
          return {control_field_v3(psi, l.edge_left, l.edge_right, Boundary::first, l.gains[0]),
                  control_field_v3(psi, l.edge_left, l.edge_right, Boundary::last, l.gains[1])};
        }
      },
      law_);
}

double ControlLaw::target_fidelity(std::span<const Complex> psi) const {
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, V1Law>) {
          return std::abs(inner(l.target, psi));
        } else if constexpr (std::is_same_v<T, V2Law>) {
          return std::abs(inner(l.p->basis().eigenvectors[l.p->target()], psi));
        } else {
          return std::sqrt(std::norm(inner(l.edge_left, psi)) + std::norm(inner(l.edge_right, psi)));
        }
      },
      law_);
}

ControlLaw ControlLaw::scaled(double factor) const {
  Variant copy = law_;
  std::visit([&](auto& l) { for (double& g : l.gains) g *= factor; }, copy);
  return ControlLaw(std::move(copy));
}

}  // namespace edgectl

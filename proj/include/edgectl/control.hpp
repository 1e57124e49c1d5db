#pragma once

#include <array>
#include <memory>
#include <variant>

#include "edgectl/lattice.hpp"
#include "edgectl/spectral.hpp"
#include "edgectl/types.hpp"

namespace edgectl {

enum class LawKind { v1, v2, v3 };

const char* to_string(LawKind kind);
LawKind parse_law_kind(std::string_view text);

/// Per-channel gains; index 0 drives site 1, index 1 drives site N.
using Gains = std::array<double, 2>;
/// Field values (f_1, f_2) in the same channel order.
using FieldPair = std::array<double, 2>;

inline std::size_t channel_index(Boundary k) { return k == Boundary::first ? 0 : 1; }

/// P = sum_i p_i |lambda_i><lambda_i| over the eigenbasis of H0, with the
/// identity offset fixed to zero.
class POperator {
 public:
  POperator(std::shared_ptr<const SpectralDecomposition> basis, RealVector p_values,
            std::size_t target);

  const SpectralDecomposition& basis() const { return *basis_; }
  std::shared_ptr<const SpectralDecomposition> basis_ptr() const { return basis_; }
  const RealVector& p_values() const { return p_values_; }
  std::size_t target() const { return target_; }

  /// p_target < p_i for every i != target.
  bool target_is_minimum() const;

  /// Row of P at the given boundary site. i[H_k, P] is supported on this
  /// row and its transpose only.
  const RealVector& boundary_row(Boundary k) const {
    return k == Boundary::first ? row_first_ : row_last_;
  }

  /// <psi|P|psi>
  double expectation(std::span<const Complex> psi) const;
  /// (P psi)_site for a 0-based site index.
  Complex apply_row(Boundary k, std::span<const Complex> psi) const;
  /// Row-major N*N.
  std::vector<double> dense() const;

  /// Same operator plus c * identity, returned with p_i + c.
  POperator shifted(double c) const;

 private:
  std::shared_ptr<const SpectralDecomposition> basis_;
  RealVector p_values_;
  std::size_t target_;
  RealVector row_first_;
  RealVector row_last_;
};

/// p_i = lambda_i for i != target, p_target = p_f. Rejects p_f that is not
/// strictly below every other coefficient.
POperator build_p1(std::shared_ptr<const SpectralDecomposition> basis, std::size_t target,
                   double p_f = -3.0);

/// p_i = p for i != target, p_target = p_f. With `require_ordering` false the
/// operator is built even when p_f >= p; the optimization grid scans that
/// region on purpose.
POperator build_uniform_p(std::shared_ptr<const SpectralDecomposition> basis,
                          std::size_t target, double p, double p_f,
                          bool require_ordering = true);

struct V1Law {
  Gains gains{1.0, 1.0};
  StateVector target;
};

struct V2Law {
  Gains gains{5.0, 5.0};
  std::shared_ptr<const POperator> p;
};

struct V3Law {
  Gains gains{1.0, 1.0};
  StateVector edge_left;
  StateVector edge_right;
};

/// Tagged Lyapunov feedback law. Immutable; safe to share across threads.
class ControlLaw {
 public:
  using Variant = std::variant<V1Law, V2Law, V3Law>;

  explicit ControlLaw(Variant law);

  static ControlLaw v1(StateVector target, Gains gains = {1.0, 1.0});
  static ControlLaw v2(POperator p, Gains gains = {5.0, 5.0});
  static ControlLaw v3(const EdgePair& pair, Gains gains = {1.0, 1.0});

  LawKind kind() const;
  const Variant& variant() const { return law_; }
  const Gains& gains() const;
  std::size_t dimension() const;

  /// V1, V2 or V3 evaluated at psi.
  double lyapunov(std::span<const Complex> psi) const;
  /// Feedback fields (f_1, f_2) at psi.
  FieldPair fields(std::span<const Complex> psi) const;
  /// Fidelity to what the law steers toward: |<psi_T|psi>| for V1, the
  /// overlap with the P target eigenstate for V2, and the norm of the
  /// projection onto span{Edge_1, Edge_N} for V3.
  double target_fidelity(std::span<const Complex> psi) const;

  /// Copy with every gain multiplied by `factor`.
  ControlLaw scaled(double factor) const;

 private:
  Variant law_;
};

/// A_1k Im[e^{i arg<psi|psi_T>} <psi_T|H_k|psi>]; 0 when <psi|psi_T> = 0.
double control_field_v1(std::span<const Complex> psi, const V1Law& law, Boundary k);

/// -A_2k <psi| i[H_k, P] |psi>.
double control_field_v2(std::span<const Complex> psi, const POperator& p, Boundary k,
                        double gain);

/// A_3k sum_{m in {1,N}} Im[e^{i arg<psi|Edge_m>} <Edge_m|H_k|psi>], with the
/// sign chosen so that V3 decreases; zero-overlap terms are dropped.
double control_field_v3(std::span<const Complex> psi, std::span<const Complex> edge_left,
                        std::span<const Complex> edge_right, Boundary k, double gain);

double control_field_v3(std::span<const Complex> psi, const EdgePair& pair, Boundary k,
                        double gain);

}  // namespace edgectl

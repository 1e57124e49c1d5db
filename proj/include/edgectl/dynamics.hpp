#pragma once

#include <optional>

#include "edgectl/control.hpp"
#include "edgectl/lattice.hpp"
#include "edgectl/spectral.hpp"
#include "edgectl/types.hpp"

namespace edgectl {

/// Raised when dt times the instantaneous generator norm exceeds the
/// configured stability limit.
class StabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct IntegratorParams {
  double dt = 0.01;
  double t_max = 1000.0;
  std::size_t record_stride = 100;
  bool renormalize = true;
  std::optional<double> stop_fidelity;
  bool store_states = false;
  /// Applied fields are (1 + delta_k) f_k; this holds (1 + delta_1, 1 + delta_2).
  FieldPair field_scale{1.0, 1.0};
  double stability_limit = 0.5;

  void validate() const;
};

/// Optional series recorded alongside the mandatory ones.
struct RecordOptions {
  /// Fidelity reference; defaults to the law's own target.
  std::optional<StateVector> fidelity_reference;
  /// Enables a_edge1_sq and the edge fidelity series.
  const EdgePair* edges = nullptr;
  bool concurrence = false;
  /// Enables eigen_populations, |<lambda_i|psi>|^2 for every eigenstate.
  const SpectralDecomposition* eigenbasis = nullptr;
};

struct Trajectory {
  RealVector times;
  std::vector<StateVector> states;  // filled only when store_states
  RealVector lyapunov;
  std::array<RealVector, 2> fields;  // applied f_1, f_2 at the recorded states
  RealVector fidelity_target;
  /// Largest |norm - 1| seen over the steps since the previous record,
  /// measured before renormalization.
  RealVector norm_drift;
  RealVector concurrence;
  RealVector a_edge1_sq;      // |<Edge_1|psi>|^2
  RealVector fidelity_edge1;  // |<Edge_1|psi>|
  RealVector fidelity_edgeN;  // |<Edge_N|psi>|
  std::vector<RealVector> eigen_populations;

  StateVector final_state;
  double final_time = 0.0;
  std::size_t steps = 0;
  bool stopped_early = false;
  double max_norm_drift = 0.0;

  std::size_t size() const { return times.size(); }
  double final_fidelity() const { return fidelity_target.empty() ? 0.0 : fidelity_target.back(); }
};

/// -i (H0 + sum_k scale_k f_k(psi) H_k) psi, with the fields evaluated at
/// psi itself. Writes into `out` and returns the applied fields.
FieldPair rhs(std::span<const Complex> psi, const HamiltonianMatrix& h0, const ControlLaw& law,
              std::span<Complex> out, FieldPair field_scale = {1.0, 1.0});

StateVector rhs(std::span<const Complex> psi, const HamiltonianMatrix& h0, const ControlLaw& law,
                FieldPair field_scale = {1.0, 1.0});

/// Fixed-step RK4 integration of the feedback-controlled Schrodinger
/// equation. Throws StabilityError or NumericalError.
Trajectory evolve(const HamiltonianMatrix& h0, const ControlLaw& law, StateVector psi0,
                  const IntegratorParams& params, const RecordOptions& record = {});

/// First recorded time at which the fidelity reaches `threshold`, linearly
/// interpolated between records.
std::optional<double> time_to_fidelity(const Trajectory& traj, double threshold);
std::optional<double> time_to_fidelity(std::span<const double> times,
                                       std::span<const double> fidelity, double threshold);

}  // namespace edgectl

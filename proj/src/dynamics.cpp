#include "edgectl/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "edgectl/observables.hpp"

namespace edgectl {

void IntegratorParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be positive");
  if (record_stride == 0) throw ConfigError("record stride must be at least 1");
  if (stop_fidelity && !(*stop_fidelity > 0.0 && *stop_fidelity <= 1.0))
    throw ConfigError("stop fidelity must lie in (0, 1]");
  if (!(stability_limit > 0.0)) throw ConfigError("stability limit must be positive");
}

FieldPair rhs(std::span<const Complex> psi, const HamiltonianMatrix& h0, const ControlLaw& law,
              std::span<Complex> out, FieldPair field_scale) {
  FieldPair f = law.fields(psi);
  f[0] *= field_scale[0];
  f[1] *= field_scale[1];
  h0.apply(psi, out);
  const std::size_t last = psi.size() - 1;
  out[0] += f[0] * psi[0];
  out[last] += f[1] * psi[last];
  const Complex minus_i{0.0, -1.0};
  for (auto& x : out) x *= minus_i;
  return f;
}

StateVector rhs(std::span<const Complex> psi, const HamiltonianMatrix& h0, const ControlLaw& law,
                FieldPair field_scale) {
  StateVector out(psi.size());
  rhs(psi, h0, law, out, field_scale);
  return out;
}

namespace {

class Recorder {
 public:
  Recorder(Trajectory& traj, const ControlLaw& law, const IntegratorParams& params,
           const RecordOptions& options)
      : traj_(traj), law_(law), params_(params), options_(options) {
    if (options_.edges) {
      edge1_ = to_complex(options_.edges->left_state);
      edgeN_ = to_complex(options_.edges->right_state);
    }
  }

  double fidelity(std::span<const Complex> psi) const {
    if (options_.fidelity_reference) return std::abs(inner(*options_.fidelity_reference, psi));
    return law_.target_fidelity(psi);
  }

  void record(double t, std::span<const Complex> psi, double drift) {
    FieldPair f = law_.fields(psi);
    traj_.times.push_back(t);
    traj_.lyapunov.push_back(law_.lyapunov(psi));
    traj_.fields[0].push_back(f[0] * params_.field_scale[0]);
    traj_.fields[1].push_back(f[1] * params_.field_scale[1]);
    traj_.fidelity_target.push_back(fidelity(psi));
    traj_.norm_drift.push_back(drift);
    if (params_.store_states) traj_.states.emplace_back(psi.begin(), psi.end());
    if (options_.concurrence) traj_.concurrence.push_back(concurrence(reduced_density_1N(psi)));
    if (options_.edges) {
      const Complex a1 = inner(edge1_, psi);
      traj_.a_edge1_sq.push_back(std::norm(a1));
      traj_.fidelity_edge1.push_back(std::abs(a1));
      traj_.fidelity_edgeN.push_back(std::abs(inner(edgeN_, psi)));
    }
    if (options_.eigenbasis) {
      RealVector pops;
      pops.reserve(options_.eigenbasis->dimension());
      for (const auto& a : eigen_amplitudes(psi, *options_.eigenbasis)) pops.push_back(std::norm(a));
      traj_.eigen_populations.push_back(std::move(pops));
    }
  }

 private:
  Trajectory& traj_;
  const ControlLaw& law_;
  const IntegratorParams& params_;
  const RecordOptions& options_;
  StateVector edge1_;
  StateVector edgeN_;
};

bool all_finite(std::span<const Complex> v) {
  for (const auto& c : v)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

}  // namespace

Trajectory evolve(const HamiltonianMatrix& h0, const ControlLaw& law, StateVector psi0,
                  const IntegratorParams& params, const RecordOptions& record) {
  params.validate();
  const std::size_t n = h0.dimension();
  if (psi0.size() != n || law.dimension() != n)
    throw ConfigError("initial state, law and Hamiltonian dimensions disagree");
  if (!all_finite(psi0)) throw NumericalError("initial state is not finite");
  const double norm0 = std::sqrt(norm_squared(psi0));
  if (!(norm0 > 0.0)) throw ConfigError("initial state has zero norm");
  if (params.renormalize)
    for (auto& c : psi0) c /= norm0;

  Trajectory traj;
  Recorder recorder(traj, law, params, record);

  const double dt = params.dt;
  const auto total_steps = static_cast<std::size_t>(std::llround(params.t_max / dt));
  const double h_norm = h0.inf_norm();

  StateVector psi = std::move(psi0);
  StateVector k1(n), k2(n), k3(n), k4(n), stage(n);
  double drift_since_record = 0.0;

  recorder.record(0.0, psi, 0.0);
  std::size_t step = 0;
  bool stop = false;
  while (step < total_steps && !stop) {
    const FieldPair f1 = rhs(psi, h0, law, k1, params.field_scale);
    const double generator = h_norm + std::abs(f1[0]) + std::abs(f1[1]);
    if (dt * generator >= params.stability_limit) {
      std::ostringstream msg;
      msg << "stability guard: dt * |H| = " << dt * generator << " at t = " << step * dt
          << " exceeds " << params.stability_limit;
      throw StabilityError(msg.str());
    }
    for (std::size_t i = 0; i < n; ++i) stage[i] = psi[i] + 0.5 * dt * k1[i];
    rhs(stage, h0, law, k2, params.field_scale);
    for (std::size_t i = 0; i < n; ++i) stage[i] = psi[i] + 0.5 * dt * k2[i];
    rhs(stage, h0, law, k3, params.field_scale);
    for (std::size_t i = 0; i < n; ++i) stage[i] = psi[i] + dt * k3[i];
    rhs(stage, h0, law, k4, params.field_scale);
    for (std::size_t i = 0; i < n; ++i)
      psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    ++step;

    if (!all_finite(psi)) {
      std::ostringstream msg;
      msg << "state became non-finite at t = " << step * dt;
      throw NumericalError(msg.str());
    }
    const double norm = std::sqrt(norm_squared(psi));
    const double drift = std::abs(norm - 1.0);
    drift_since_record = std::max(drift_since_record, drift);
    traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
    if (params.renormalize)
      for (auto& c : psi) c /= norm;

    if (step % params.record_stride == 0 || step == total_steps) {
      recorder.record(static_cast<double>(step) * dt, psi, drift_since_record);
      drift_since_record = 0.0;
      if (params.stop_fidelity && traj.fidelity_target.back() >= *params.stop_fidelity) {
        stop = true;
        traj.stopped_early = step < total_steps;
      }
    }
  }

  traj.final_state = std::move(psi);
  traj.final_time = static_cast<double>(step) * dt;
  traj.steps = step;
  return traj;
}

std::optional<double> time_to_fidelity(std::span<const double> times,
                                       std::span<const double> fidelity, double threshold) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (fidelity[i] >= threshold) {
      if (i == 0) return times[0];
      const double f0 = fidelity[i - 1], f1 = fidelity[i];
      const double w = f1 > f0 ? (threshold - f0) / (f1 - f0) : 1.0;
      return times[i - 1] + w * (times[i] - times[i - 1]);
    }
  }
  return std::nullopt;
}

std::optional<double> time_to_fidelity(const Trajectory& traj, double threshold) {
  return time_to_fidelity(traj.times, traj.fidelity_target, threshold);
}

}  // namespace edgectl

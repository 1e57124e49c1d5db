#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edgectl/control.hpp"
#include "edgectl/csv.hpp"
#include "edgectl/dynamics.hpp"
#include "edgectl/lattice.hpp"
#include "edgectl/rng.hpp"
#include "edgectl/spectral.hpp"

namespace edgectl {

/// Lattice, its spectrum and its labelled edge pair, built once and shared
/// read-only by every trajectory of an experiment.
struct Model {
  LatticeSpec spec;
  HamiltonianMatrix h0;
  std::shared_ptr<const SpectralDecomposition> spectrum;
  EdgePair edges;
};

/// Throws EdgeStateError when the lattice has no usable edge pair.
Model prepare_model(const LatticeSpec& spec, EdgeDetection detection = {});

struct LawDescriptor {
  LawKind kind = LawKind::v2;
  std::optional<double> gain;  // both channels; defaults: V1 1, V2 5, V3 1
  double p_f = -3.0;
  std::optional<double> p;     // uniform p_i for V2; unset means p_i = lambda_i
  Boundary target = Boundary::last;

  double effective_gain() const;
};

ControlLaw make_law(const LawDescriptor& law, const Model& model, bool require_ordering = true);

/// Where an experiment starts: a site |n>, an edge state, or
/// cos(theta)|n> + sin(theta)|m>.
struct InitialState {
  enum class Kind { site, edge_left, edge_right, two_site };
  Kind kind = Kind::site;
  std::size_t site = 3;
  std::size_t second_site = 2;
  double theta = 0.0;

  /// "3", "site:3", "edge1", "edgeN", "theta:1,2,0.5"
  static InitialState parse(std::string_view text);
  std::string str() const;
  StateVector build(const Model& model) const;
};

/// Injected imperfections: applied fields (1 + delta_k) f_k and an initial
/// state with infidelity delta against the ideal one.
struct ErrorModel {
  FieldPair field_scale_delta{0.0, 0.0};
  double initial_state_delta = 0.0;

  void validate() const;
  FieldPair field_scale() const {
    return {1.0 + field_scale_delta[0], 1.0 + field_scale_delta[1]};
  }
};

struct ExperimentConfig {
  LatticeSpec lattice;
  LawDescriptor law;
  double dt = 0.01;
  std::optional<double> t_max;  // unset: 1000 for V2, 2000 for V1 and V3
  std::size_t record_stride = 100;
  std::optional<double> stop_fidelity;
  EdgeDetection edges;
  InitialState initial;
  std::optional<double> threshold;  // unset: 0.99 for scaling, 0.97 otherwise
  ErrorModel errors;

  std::size_t theta_points = 101;
  std::size_t count = 500;
  std::size_t scan_count = 0;
  RealVector p_grid;
  RealVector pf_grid;
  RealVector deltas;
  std::vector<std::size_t> n_list;
  std::optional<double> scaling_t_max;

  std::uint64_t seed = 42;
  unsigned workers = 1;
  std::string out = "-";
  std::string scan_out;

  ExperimentConfig();

  double horizon() const;
  double threshold_or(double fallback) const { return threshold.value_or(fallback); }
  IntegratorParams integrator() const;

  /// Applies one key=value setting; keys are the CLI long-option names.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  /// key=value text that reproduces this configuration through set().
  std::string to_text() const;
  static ExperimentConfig from_text(std::string_view text);
};

/// Parses "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> read_key_value_file(const std::string& path);
/// Every key ExperimentConfig::set accepts.
const std::vector<std::string>& config_keys();

/// "a:b:step" (inclusive) or "x,y,z".
RealVector parse_grid(std::string_view text);

enum class RandomForm { two_site_theta, gaussian };

struct TwoSiteDraw {
  std::size_t n = 1;  // 1-based
  std::size_t m = 2;
  double theta = 0.0;
  StateVector state;
};

/// Distinct n != m uniform in 1..N and theta uniform in [0, 2 pi).
TwoSiteDraw draw_two_site(Rng& rng, std::size_t sites);
StateVector gaussian_state(Rng& rng, std::size_t sites);
StateVector random_initial_state(std::uint64_t seed, std::size_t sites, RandomForm form);
StateVector two_site_state(std::size_t sites, std::size_t n, std::size_t m, double theta);

/// normalize(ideal + k chi), chi a Gaussian state orthogonal to `ideal`,
/// with k bisected so that 1 - |<psi0|ideal>| = delta to 1e-10.
StateVector mix_initial_error(std::span<const Complex> ideal, double delta, std::uint64_t seed);

/// Trajectory CSV: time,V,fidelity_target,f1,f2,norm_drift[,concurrence][,a_edge1_sq]
CsvTable trajectory_table(const Trajectory& traj);

struct SweepRecord {
  std::size_t index = 0;
  RealVector params;
  double fidelity_final = 0.0;
  std::optional<double> time_to_threshold;
  std::optional<double> concurrence_final;
};

/// Sweep CSV: index,param...,fidelity_final,time_to_threshold[,concurrence_final]
struct SweepResult {
  std::vector<std::string> param_names;
  bool with_concurrence = false;
  std::vector<SweepRecord> rows;

  CsvTable table() const;
  double mean_fidelity() const;
  double mean_concurrence() const;
  std::size_t param_column(std::string_view name) const;
  double param(std::size_t row, std::string_view name) const {
    return rows[row].params[param_column(name)];
  }
};

struct RunResult {
  Trajectory trajectory;
  CsvTable table() const { return trajectory_table(trajectory); }
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const double> x, std::span<const double> y);
/// Mean over the final `fraction` of a series.
double steady_value(std::span<const double> series, double fraction = 0.1);

struct ScalingResult {
  SweepResult sweep;
  LinearFit fit;
  std::vector<std::size_t> missing_edges;
};

struct EntangleResult {
  RunResult run;
  double steady_concurrence = 0.0;
  std::optional<SweepResult> scan;
  double scan_mean_concurrence = 0.0;
  double scan_correlation = 0.0;  // corr(concurrence, F(psi0, Edge_1))
};

RunResult run_single(const ExperimentConfig& config);
SweepResult sweep_initial_sites(const ExperimentConfig& config);
SweepResult sweep_theta(const ExperimentConfig& config);
SweepResult sweep_random(const ExperimentConfig& config);
SweepResult optimize_p(const ExperimentConfig& config);
SweepResult robustness_scan(const ExperimentConfig& config);
ScalingResult scaling_study(const ExperimentConfig& config);
EntangleResult entangle_run(const ExperimentConfig& config);

/// Spectrum CSV: index,energy,boundary_weight,site1_probability,siteN_probability,label
CsvTable spectrum_table(const Model& model);

}  // namespace edgectl

#include "edgectl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "edgectl/observables.hpp"
#include "edgectl/parallel.hpp"

namespace edgectl {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Model prepare_model(const LatticeSpec& spec, EdgeDetection detection) {
  HamiltonianMatrix h0 = build_hamiltonian(spec);
  auto spectrum = std::make_shared<SpectralDecomposition>(eigendecompose(h0));
  EdgePair edges = label_edge_states(*spectrum, detection);
  if (edges.remixed) {
    // Keep P operators consistent with the single-ended pair.
    spectrum->eigenvectors[edges.left_index] = edges.left_state;
    spectrum->eigenvectors[edges.right_index] = edges.right_state;
  }
  return Model{spec, std::move(h0), std::move(spectrum), std::move(edges)};
}

double LawDescriptor::effective_gain() const {
  if (gain) return *gain;
  return kind == LawKind::v2 ? 5.0 : 1.0;
}

ControlLaw make_law(const LawDescriptor& law, const Model& model, bool require_ordering) {
  const double g = law.effective_gain();
  const Gains gains{g, g};
  const std::size_t target =
      law.target == Boundary::last ? model.edges.right_index : model.edges.left_index;
  switch (law.kind) {
    case LawKind::v1: {
      const auto& state =
          law.target == Boundary::last ? model.edges.right_state : model.edges.left_state;
      return ControlLaw::v1(to_complex(state), gains);
    }
    case LawKind::v2: {
      if (law.p)
        return ControlLaw::v2(
            build_uniform_p(model.spectrum, target, *law.p, law.p_f, require_ordering), gains);
      return ControlLaw::v2(build_p1(model.spectrum, target, law.p_f), gains);
    }
    case LawKind::v3:
      return ControlLaw::v3(model.edges, gains);
  }
  throw ConfigError("unknown law");
}

InitialState InitialState::parse(std::string_view text) {
  std::string t(text);
  InitialState s;
  if (t == "edge1") {
    s.kind = Kind::edge_left;
    return s;
  }
  if (t == "edgeN") {
    s.kind = Kind::edge_right;
    return s;
  }
  auto parse_size = [&](const std::string& x) -> std::size_t {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(x, &pos);
      if (pos != x.size() || v < 1) throw ConfigError("");
      return static_cast<std::size_t>(v);
    } catch (...) {
      throw ConfigError("bad site in initial state '" + t + "'");
    }
  };
  if (t.rfind("theta:", 0) == 0) {
    const std::string body = t.substr(6);
    const auto c1 = body.find(',');
    const auto c2 = body.find(',', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ConfigError("initial state '" + t + "' must be theta:n,m,angle");
    s.kind = Kind::two_site;
    s.site = parse_size(body.substr(0, c1));
    s.second_site = parse_size(body.substr(c1 + 1, c2 - c1 - 1));
    s.theta = parse_angle(body.substr(c2 + 1));
    return s;
  }
  if (t.rfind("site:", 0) == 0) t = t.substr(5);
  s.kind = Kind::site;
  s.site = parse_size(t);
  return s;
}

std::string InitialState::str() const {
  switch (kind) {
    case Kind::edge_left: return "edge1";
    case Kind::edge_right: return "edgeN";
    case Kind::two_site:
      return "theta:" + std::to_string(site) + "," + std::to_string(second_site) + "," +
             format_number(theta);
    case Kind::site: break;
  }
  return std::to_string(site);
}

StateVector InitialState::build(const Model& model) const {
  const std::size_t n = model.spec.sites;
  switch (kind) {
    case Kind::edge_left: return to_complex(model.edges.left_state);
    case Kind::edge_right: return to_complex(model.edges.right_state);
    case Kind::two_site: return two_site_state(n, site, second_site, theta);
    case Kind::site: break;
  }
  return basis_state(n, site);
}

void ErrorModel::validate() const {
  if (!(initial_state_delta >= 0.0 && initial_state_delta < 1.0))
    throw ConfigError("initial-state error must lie in [0, 1)");
  for (double d : field_scale_delta)
    if (!std::isfinite(d)) throw ConfigError("field scale error must be finite");
}

StateVector two_site_state(std::size_t sites, std::size_t n, std::size_t m, double theta) {
  if (n < 1 || n > sites || m < 1 || m > sites) throw ConfigError("two-site state out of range");
  StateVector v(sites, Complex{0.0, 0.0});
  v[n - 1] += std::cos(theta);
  v[m - 1] += std::sin(theta);
  return v;
}

TwoSiteDraw draw_two_site(Rng& rng, std::size_t sites) {
  if (sites < 3) throw ConfigError("random states need at least 3 sites");
  TwoSiteDraw d;
  d.n = 1 + static_cast<std::size_t>(rng.below(sites));
  d.m = 1 + static_cast<std::size_t>(rng.below(sites - 1));
  if (d.m >= d.n) ++d.m;
  d.theta = 2.0 * std::numbers::pi * rng.uniform();
  d.state = two_site_state(sites, d.n, d.m, d.theta);
  return d;
}

StateVector gaussian_state(Rng& rng, std::size_t sites) {
  StateVector v(sites);
  for (auto& c : v) {
    const double re = rng.normal();
    const double im = rng.normal();
    c = {re, im};
  }
  const double norm = std::sqrt(norm_squared(v));
  for (auto& c : v) c /= norm;
  return v;
}

StateVector random_initial_state(std::uint64_t seed, std::size_t sites, RandomForm form) {
  if (sites < 3) throw ConfigError("random states need at least 3 sites");
  Rng rng(seed);
  if (form == RandomForm::gaussian) return gaussian_state(rng, sites);
  return draw_two_site(rng, sites).state;
}

StateVector mix_initial_error(std::span<const Complex> ideal, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("initial-state error must lie in [0, 1)");
  StateVector base(ideal.begin(), ideal.end());
  const double norm = std::sqrt(norm_squared(base));
  for (auto& c : base) c /= norm;
  if (delta == 0.0) return StateVector(ideal.begin(), ideal.end());

  Rng rng(seed);
  StateVector chi = gaussian_state(rng, base.size());
  const Complex overlap = inner(base, chi);
  for (std::size_t i = 0; i < chi.size(); ++i) chi[i] -= overlap * base[i];
  const double chi_norm = std::sqrt(norm_squared(chi));
  if (!(chi_norm > 1e-12)) throw NumericalError("degenerate error direction");
  for (auto& c : chi) c /= chi_norm;

  auto mixed = [&](double k) {
    StateVector psi(base.size());
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = base[i] + k * chi[i];
    const double nn = std::sqrt(norm_squared(psi));
    for (auto& c : psi) c /= nn;
    return psi;
  };
  auto infidelity = [&](double k) {
    const auto psi = mixed(k);
    return 1.0 - std::abs(inner(psi, base));
  };

  // infidelity(k) rises monotonically from 0 toward 1 as k grows.
  double lo = 0.0, hi = 1.0;
  while (infidelity(hi) < delta) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("initial-state error bisection failed to bracket");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (infidelity(mid) < delta ? lo : hi) = mid;
  }
  StateVector psi = mixed(0.5 * (lo + hi));
  if (std::abs(1.0 - std::abs(inner(psi, base)) - delta) > 1e-10)
    throw NumericalError("initial-state error bisection did not converge");
  return psi;
}

CsvTable trajectory_table(const Trajectory& traj) {
  std::vector<std::string> header{"time", "V", "fidelity_target", "f1", "f2", "norm_drift"};
  const bool with_c = !traj.concurrence.empty();
  const bool with_a = !traj.a_edge1_sq.empty();
  if (with_c) header.emplace_back("concurrence");
  if (with_a) header.emplace_back("a_edge1_sq");
  CsvTable table(std::move(header));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    auto row = table.row();
    row.add(traj.times[i])
        .add(traj.lyapunov[i])
        .add(traj.fidelity_target[i])
        .add(traj.fields[0][i])
        .add(traj.fields[1][i])
        .add(traj.norm_drift[i]);
    if (with_c) row.add(traj.concurrence[i]);
    if (with_a) row.add(traj.a_edge1_sq[i]);
    row.done();
  }
  return table;
}

CsvTable SweepResult::table() const {
  std::vector<std::string> header{"index"};
  header.insert(header.end(), param_names.begin(), param_names.end());
  header.emplace_back("fidelity_final");
  header.emplace_back("time_to_threshold");
  if (with_concurrence) header.emplace_back("concurrence_final");
  CsvTable t(std::move(header));
  for (const auto& r : rows) {
    auto row = t.row();
    row.add(r.index);
    for (double p : r.params) row.add(p);
    row.add(r.fidelity_final).add(r.time_to_threshold);
    if (with_concurrence) row.add(r.concurrence_final);
    row.done();
  }
  return t;
}

double SweepResult::mean_fidelity() const {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.fidelity_final;
  return s / static_cast<double>(rows.size());
}

double SweepResult::mean_concurrence() const {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows)
    if (r.concurrence_final) {
      s += *r.concurrence_final;
      ++n;
    }
  return n ? s / static_cast<double>(n) : 0.0;
}

std::size_t SweepResult::param_column(std::string_view name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i)
    if (param_names[i] == name) return i;
  throw ConfigError("sweep has no parameter '" + std::string(name) + "'");
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  LinearFit fit;
  fit.points = x.size();
  if (x.size() < 2) return fit;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const auto fit = fit_line(x, y);
  return std::copysign(std::sqrt(fit.r_squared), fit.slope);
}

double steady_value(std::span<const double> series, double fraction) {
  if (series.empty()) return 0.0;
  const auto tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(series.size()))));
  const auto begin = series.end() - static_cast<std::ptrdiff_t>(std::min(tail, series.size()));
  return std::accumulate(begin, series.end(), 0.0) / static_cast<double>(series.end() - begin);
}

namespace {

struct Evolved {
  double fidelity_final = 0.0;
  std::optional<double> time_to_threshold;
  Trajectory traj;
};

Evolved evolve_summary(const Model& model, const ControlLaw& law, StateVector psi0,
                       const IntegratorParams& params, double threshold,
                       const RecordOptions& record = {}) {
  Evolved e;
  e.traj = evolve(model.h0, law, std::move(psi0), params, record);
  e.fidelity_final = e.traj.final_fidelity();
  e.time_to_threshold = time_to_fidelity(e.traj, threshold);
  return e;
}

double edge1_fidelity(const Model& model, std::span<const Complex> psi) {
  return std::abs(inner(model.edges.left_state, psi));
}

}  // namespace

RunResult run_single(const ExperimentConfig& config) {
  config.validate();
  const Model model = prepare_model(config.lattice, config.edges);
  const ControlLaw law = make_law(config.law, model);
  StateVector psi0 = config.initial.build(model);
  if (config.errors.initial_state_delta > 0.0)
    psi0 = mix_initial_error(psi0, config.errors.initial_state_delta, config.seed);
  RecordOptions record;
  record.edges = &model.edges;
  record.concurrence = config.law.kind == LawKind::v3;
  return RunResult{evolve(model.h0, law, std::move(psi0), config.integrator(), record)};
}

SweepResult sweep_initial_sites(const ExperimentConfig& config) {
  config.validate();
  const Model model = prepare_model(config.lattice, config.edges);
  const ControlLaw law = make_law(config.law, model);
  const auto params = config.integrator();
  const double threshold = config.threshold_or(0.97);
  const std::size_t n = model.spec.sites;

  SweepResult result;
  result.param_names = {"site", "fidelity_edge1_initial"};
  result.rows = run_tasks(n, config.workers, [&](std::size_t i) {
    StateVector psi0 = basis_state(n, i + 1);
    const double f_edge1 = edge1_fidelity(model, psi0);
    auto e = evolve_summary(model, law, std::move(psi0), params, threshold);
    return SweepRecord{i, {static_cast<double>(i + 1), f_edge1}, e.fidelity_final,
                       e.time_to_threshold, std::nullopt};
  });
  return result;
}

SweepResult sweep_theta(const ExperimentConfig& config) {
  config.validate();
  const Model model = prepare_model(config.lattice, config.edges);
  const ControlLaw law = make_law(config.law, model);
  const auto params = config.integrator();
  const double threshold = config.threshold_or(0.97);
  const std::size_t points = config.theta_points;

  SweepResult result;
  result.param_names = {"theta", "fidelity_edge1_initial"};
  result.rows = run_tasks(points, config.workers, [&](std::size_t i) {
    const double theta =
        2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points - 1);
    StateVector psi0 = two_site_state(model.spec.sites, 1, 2, theta);
    const double f_edge1 = edge1_fidelity(model, psi0);
    auto e = evolve_summary(model, law, std::move(psi0), params, threshold);
    return SweepRecord{i, {theta, f_edge1}, e.fidelity_final, e.time_to_threshold, std::nullopt};
  });
  return result;
}

SweepResult sweep_random(const ExperimentConfig& config) {
  config.validate();
  const Model model = prepare_model(config.lattice, config.edges);
  const ControlLaw law = make_law(config.law, model);
  const auto params = config.integrator();
  const double threshold = config.threshold_or(0.97);

  SweepResult result;
  result.param_names = {"n", "m", "theta", "fidelity_edge1_initial"};
  result.rows = run_tasks(config.count, config.workers, [&](std::size_t i) {
    Rng rng = Rng::for_task(config.seed, i);
    TwoSiteDraw draw = draw_two_site(rng, model.spec.sites);
    const double f_edge1 = edge1_fidelity(model, draw.state);
    auto e = evolve_summary(model, law, std::move(draw.state), params, threshold);
    return SweepRecord{i,
                       {static_cast<double>(draw.n), static_cast<double>(draw.m), draw.theta,
                        f_edge1},
                       e.fidelity_final,
                       e.time_to_threshold,
                       std::nullopt};
  });
  return result;
}

SweepResult optimize_p(const ExperimentConfig& config) {
  config.validate();
  const Model model = prepare_model(config.lattice, config.edges);
  const auto params = config.integrator();
  const double threshold = config.threshold_or(0.97);
  const StateVector psi0 = config.initial.build(model);

  struct Point {
    double p, pf;
  };
  std::vector<Point> grid;
  for (double p : config.p_grid)
    for (double pf : config.pf_grid) grid.push_back({p, pf});

  SweepResult result;
  result.param_names = {"p", "pf"};
  result.rows = run_tasks(grid.size(), config.workers, [&](std::size_t i) {
    LawDescriptor d = config.law;
    d.kind = LawKind::v2;
    d.p = grid[i].p;
    d.p_f = grid[i].pf;
    const ControlLaw law = make_law(d, model, /*require_ordering=*/false);
    auto e = evolve_summary(model, law, psi0, params, threshold);
    return SweepRecord{i, {grid[i].p, grid[i].pf}, e.fidelity_final, e.time_to_threshold,
                       std::nullopt};
  });
  return result;
}

SweepResult robustness_scan(const ExperimentConfig& config) {
  config.validate();
  const Model model = prepare_model(config.lattice, config.edges);
  const ControlLaw law = make_law(config.law, model);
  const double threshold = config.threshold_or(0.97);
  const StateVector ideal = config.initial.build(model);

  // channel 0: initial-state error, 1: f_1 scaling, 2: f_2 scaling
  struct Job {
    std::size_t channel;
    double delta;
  };
  std::vector<Job> jobs;
  for (double d : config.deltas)
    for (std::size_t ch = 0; ch < 3; ++ch) jobs.push_back({ch, d});

  SweepResult result;
  result.param_names = {"channel", "delta"};
  result.rows = run_tasks(jobs.size(), config.workers, [&](std::size_t i) {
    const auto& job = jobs[i];
    auto params = config.integrator();
    StateVector psi0 = ideal;
    if (job.channel == 0) {
      if (job.delta < 0.0 || job.delta >= 1.0)
        throw ConfigError("initial-state error must lie in [0, 1)");
      psi0 = mix_initial_error(ideal, job.delta, Rng::for_task(config.seed, i).next());
    } else {
      params.field_scale[job.channel - 1] *= 1.0 + job.delta;
    }
    auto e = evolve_summary(model, law, std::move(psi0), params, threshold);
    return SweepRecord{i, {static_cast<double>(job.channel), job.delta}, e.fidelity_final,
                       e.time_to_threshold, std::nullopt};
  });
  return result;
}

ScalingResult scaling_study(const ExperimentConfig& config) {
  config.validate();
  const double threshold = config.threshold_or(0.99);
  const auto& sizes = config.n_list;

  struct Outcome {
    SweepRecord record;
    bool edges_found;
  };
  auto outcomes = run_tasks(sizes.size(), config.workers, [&](std::size_t i) {
    LatticeSpec spec = config.lattice;
    spec.sites = sizes[i];
    Outcome out{SweepRecord{i, {static_cast<double>(sizes[i]), 0.0}, 0.0, std::nullopt, std::nullopt},
                false};
    Model model = [&]() -> Model {
      try {
        return prepare_model(spec, config.edges);
      } catch (const EdgeStateError&) {
        return Model{spec, build_hamiltonian(spec), nullptr, {}};
      }
    }();
    if (!model.spectrum) return out;
    out.edges_found = true;
    out.record.params[1] = 1.0;
    const ControlLaw law = make_law(config.law, model);
    auto params = config.integrator();
    params.t_max = config.scaling_t_max.value_or(10000.0);
    params.stop_fidelity = threshold;
    auto e = evolve_summary(model, law, config.initial.build(model), params, threshold);
    out.record.fidelity_final = e.fidelity_final;
    out.record.time_to_threshold = e.time_to_threshold;
    return out;
  });

  ScalingResult result;
  result.sweep.param_names = {"n", "edge_states_found"};
  RealVector xs, ys;
  for (auto& o : outcomes) {
    if (!o.edges_found) result.missing_edges.push_back(sizes[o.record.index]);
    if (o.record.time_to_threshold) {
      xs.push_back(o.record.params[0]);
      ys.push_back(*o.record.time_to_threshold);
    }
    result.sweep.rows.push_back(std::move(o.record));
  }
  result.fit = fit_line(xs, ys);
  return result;
}

EntangleResult entangle_run(const ExperimentConfig& config) {
  config.validate();
  ExperimentConfig cfg = config;
  cfg.law.kind = LawKind::v3;
  const Model model = prepare_model(cfg.lattice, cfg.edges);
  const ControlLaw law = make_law(cfg.law, model);
  const auto params = cfg.integrator();

  RecordOptions record;
  record.edges = &model.edges;
  record.concurrence = true;

  EntangleResult result;
  result.run.trajectory = evolve(model.h0, law, cfg.initial.build(model), params, record);
  result.steady_concurrence = steady_value(result.run.trajectory.concurrence);

  if (cfg.scan_count > 0) {
    const double threshold = cfg.threshold_or(0.97);
    SweepResult scan;
    scan.param_names = {"n", "m", "theta", "fidelity_edge1_initial"};
    scan.with_concurrence = true;
    scan.rows = run_tasks(cfg.scan_count, cfg.workers, [&](std::size_t i) {
      Rng rng = Rng::for_task(cfg.seed, i);
      TwoSiteDraw draw = draw_two_site(rng, model.spec.sites);
      const double f_edge1 = edge1_fidelity(model, draw.state);
      RecordOptions rec;
      rec.concurrence = true;
      auto e = evolve_summary(model, law, std::move(draw.state), params, threshold, rec);
      return SweepRecord{i,
                         {static_cast<double>(draw.n), static_cast<double>(draw.m), draw.theta,
                          f_edge1},
                         e.fidelity_final,
                         e.time_to_threshold,
                         steady_value(e.traj.concurrence)};
    });
    RealVector c, f;
    for (const auto& r : scan.rows) {
      c.push_back(*r.concurrence_final);
      f.push_back(r.params[3]);
    }
    result.scan_mean_concurrence = scan.mean_concurrence();
    result.scan_correlation = pearson(c, f);
    result.scan = std::move(scan);
  }
  return result;
}

CsvTable spectrum_table(const Model& model) {
  CsvTable t({"index", "energy", "boundary_weight", "site1_probability", "siteN_probability",
              "label"});
  const auto& d = *model.spectrum;
  for (std::size_t i = 0; i < d.dimension(); ++i) {
    const auto& v = d.eigenvectors[i];
    std::string label = "bulk";
    if (d.edge_left && *d.edge_left == i) label = "edge1";
    if (d.edge_right && *d.edge_right == i) label = "edgeN";
    t.row()
        .add(i)
        .add(d.eigenvalues[i])
        .add(boundary_weight(v))
        .add(v.front() * v.front())
        .add(v.back() * v.back())
        .add(label)
        .done();
  }
  return t;
}

}  // namespace edgectl

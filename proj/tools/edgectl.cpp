// edgectl: command-line driver for the edge-state control experiments.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "edgectl/harness.hpp"

using namespace edgectl;

namespace {

void print_summary(const std::string& line) { std::cerr << line << '\n'; }

std::string fmt(double v) { return format_number(v); }

int run_command(const std::string& command, ExperimentConfig& cfg) {
  if (command == "spectrum") {
    cfg.validate();
    const Model model = prepare_model(cfg.lattice, cfg.edges);
    spectrum_table(model).save(cfg.out);
    print_summary("edge1 index=" + std::to_string(model.edges.left_index) +
                  " |b1|^2=" + fmt(model.edges.left_boundary_probability) +
                  " edgeN index=" + std::to_string(model.edges.right_index) +
                  " |bN|^2=" + fmt(model.edges.right_boundary_probability) +
                  " epsilon=" + fmt(edge_tail_epsilon(model.edges)));
    return 0;
  }
  if (command == "evolve") {
    const RunResult r = run_single(cfg);
    r.table().save(cfg.out);
    print_summary("final_time=" + fmt(r.trajectory.final_time) +
                  " fidelity_final=" + fmt(r.trajectory.final_fidelity()));
    return 0;
  }
  if (command == "sweep-sites" || command == "sweep-theta" || command == "sweep-random" ||
      command == "optimize-p" || command == "robustness") {
    SweepResult s;
    if (command == "sweep-sites") s = sweep_initial_sites(cfg);
    else if (command == "sweep-theta") s = sweep_theta(cfg);
    else if (command == "sweep-random") s = sweep_random(cfg);
    else if (command == "optimize-p") s = optimize_p(cfg);
    else s = robustness_scan(cfg);
    s.table().save(cfg.out);
    print_summary("rows=" + std::to_string(s.rows.size()) +
                  " mean_fidelity=" + fmt(s.mean_fidelity()));
    return 0;
  }
  if (command == "scaling") {
    const ScalingResult r = scaling_study(cfg);
    r.sweep.table().save(cfg.out);
    std::string missing;
    for (auto n : r.missing_edges) missing += (missing.empty() ? "" : ",") + std::to_string(n);
    print_summary("slope=" + fmt(r.fit.slope) + " intercept=" + fmt(r.fit.intercept) +
                  " r_squared=" + fmt(r.fit.r_squared) + " points=" +
                  std::to_string(r.fit.points) +
                  (missing.empty() ? "" : " missing_edges=" + missing));
    return 0;
  }
  if (command == "entangle") {
    const EntangleResult r = entangle_run(cfg);
    r.run.table().save(cfg.out);
    std::string line = "steady_concurrence=" + fmt(r.steady_concurrence);
    if (r.scan) {
      if (!cfg.scan_out.empty()) r.scan->table().save(cfg.scan_out);
      line += " scan_mean_concurrence=" + fmt(r.scan_mean_concurrence) +
              " scan_correlation=" + fmt(r.scan_correlation);
    }
    print_summary(line);
    return 0;
  }
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov control of edge states in a commensurate AAH lattice"};
  app.require_subcommand(1);
  app.fallthrough();

  const char* commands[][2] = {
      {"spectrum", "Eigenvalues and edge-state labels"},
      {"evolve", "Single controlled trajectory"},
      {"sweep-sites", "Final fidelity for every site initial state"},
      {"sweep-theta", "Final fidelity for cos(theta)|1> + sin(theta)|2>"},
      {"sweep-random", "Final fidelity over random two-site initial states"},
      {"optimize-p", "Final fidelity over a uniform (p, pf) grid"},
      {"robustness", "Final fidelity under field and preparation errors"},
      {"scaling", "Time to threshold fidelity versus lattice size"},
      {"entangle", "Boundary concurrence under the edge-subspace law"}};
  for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

  std::string config_path;
  app.add_option("--config", config_path, "key=value file; command-line flags take precedence");

  std::map<std::string, std::string> flags;
  for (const auto& key : config_keys()) {
    app.add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags[key] = v; }, "");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::config_error);
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig cfg;
    if (!config_path.empty())
      for (const auto& [k, v] : read_key_value_file(config_path)) cfg.set(k, v);
    for (const auto& [k, v] : flags) cfg.set(k, v);
    return run_command(command, cfg);
  } catch (const Error& e) {
    std::cerr << "edgectl " << command << ": " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "edgectl " << command << ": " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical_failure);
  }
}

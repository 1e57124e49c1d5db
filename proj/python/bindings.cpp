#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edgectl/harness.hpp"
#include "edgectl/observables.hpp"

namespace py = pybind11;
using namespace edgectl;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ExperimentConfig make_config(const py::dict& settings) {
  ExperimentConfig cfg;
  for (auto item : settings) cfg.set(py::str(item.first), py::str(item.second));
  return cfg;
}

py::dict trajectory_dict(const Trajectory& t) {
  py::dict d;
  d["time"] = to_array(t.times);
  d["V"] = to_array(t.lyapunov);
  d["fidelity_target"] = to_array(t.fidelity_target);
  d["f1"] = to_array(t.fields[0]);
  d["f2"] = to_array(t.fields[1]);
  d["norm_drift"] = to_array(t.norm_drift);
  if (!t.concurrence.empty()) d["concurrence"] = to_array(t.concurrence);
  if (!t.a_edge1_sq.empty()) d["a_edge1_sq"] = to_array(t.a_edge1_sq);
  d["final_state"] = to_array(t.final_state);
  return d;
}

}  // namespace

PYBIND11_MODULE(_edgectl, m) {
  m.doc() = "Lyapunov control of edge states in a commensurate AAH lattice";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<EdgeStateError>(m, "EdgeStateError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "spectrum",
      [](const py::dict& settings) {
        const auto cfg = make_config(settings);
        const Model model = prepare_model(cfg.lattice, cfg.edges);
        const auto& d = *model.spectrum;
        const std::size_t n = d.dimension();
        py::array_t<double> vectors({n, n});
        auto v = vectors.mutable_unchecked<2>();
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) v(j, i) = d.eigenvectors[i][j];
        py::dict out;
        out["eigenvalues"] = to_array(d.eigenvalues);
        out["eigenvectors"] = vectors;  // columns are eigenvectors
        out["edge1_index"] = model.edges.left_index;
        out["edgeN_index"] = model.edges.right_index;
        out["edge1_probability"] = model.edges.left_boundary_probability;
        out["edgeN_probability"] = model.edges.right_boundary_probability;
        out["epsilon"] = edge_tail_epsilon(model.edges);
        return out;
      },
      py::arg("settings") = py::dict(),
      "Eigenpairs and edge labels; settings use the CLI option names.");

  m.def(
      "evolve",
      [](const py::dict& settings) {
        const auto cfg = make_config(settings);
        py::gil_scoped_release release;
        auto r = run_single(cfg);
        py::gil_scoped_acquire acquire;
        return trajectory_dict(r.trajectory);
      },
      py::arg("settings") = py::dict());

  m.def(
      "sweep",
      [](const std::string& kind, const py::dict& settings) {
        const auto cfg = make_config(settings);
        SweepResult s;
        {
          py::gil_scoped_release release;
          if (kind == "sites") s = sweep_initial_sites(cfg);
          else if (kind == "theta") s = sweep_theta(cfg);
          else if (kind == "random") s = sweep_random(cfg);
          else if (kind == "optimize-p") s = optimize_p(cfg);
          else if (kind == "robustness") s = robustness_scan(cfg);
          else throw ConfigError("unknown sweep '" + kind + "'");
        }
        return s.table().str();
      },
      py::arg("kind"), py::arg("settings") = py::dict(), "Sweep CSV text.");

  m.def(
      "concurrence",
      [](const StateVector& psi) { return concurrence(reduced_density_1N(psi)); },
      py::arg("psi"));

  m.def(
      "wootters_concurrence",
      [](py::array_t<Complex, py::array::c_style | py::array::forcecast> rho) {
        if (rho.ndim() != 2 || rho.shape(0) != 4 || rho.shape(1) != 4)
          throw ConfigError("rho must be 4x4");
        Matrix4 m4;
        std::copy(rho.data(), rho.data() + 16, m4.begin());
        return wootters_concurrence(m4);
      },
      py::arg("rho"));

  m.def("config_keys", &config_keys);
  m.def("format_number", &format_number);
}

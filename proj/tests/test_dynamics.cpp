#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "edgectl/dynamics.hpp"
#include "support.hpp"

using namespace edgectl;

namespace {

struct Fixture {
  HamiltonianMatrix h0 = build_hamiltonian(LatticeSpec{});
  std::shared_ptr<SpectralDecomposition> basis;
  EdgePair pair;

  Fixture() {
    basis = std::make_shared<SpectralDecomposition>(eigendecompose(h0));
    pair = label_edge_states(*basis);
  }
  std::size_t n() const { return h0.dimension(); }
  ControlLaw v1() const { return ControlLaw::v1(to_complex(pair.right_state)); }
  ControlLaw v2() const { return ControlLaw::v2(build_p1(basis, pair.right_index)); }
  ControlLaw v3() const { return ControlLaw::v3(pair); }
};

}  // namespace

TEST_CASE("integrator parameter validation") {
  IntegratorParams p;
  CHECK_NOTHROW(p.validate());
  p.dt = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.dt = 0.01;
  p.t_max = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.t_max = 10.0;
  p.record_stride = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("rhs matches a dense generator") {
  Fixture f;
  const auto law = f.v2();
  std::mt19937_64 gen(4);
  const auto psi = testing_support::random_state(gen, f.n());
  const FieldPair scale{1.1, 0.9};
  const auto fields = law.fields(psi);
  const auto hd = f.h0.dense();
  const std::size_t n = f.n();
  std::vector<Complex> g(n * n);
  for (std::size_t i = 0; i < n * n; ++i) g[i] = Complex(0, -1) * hd[i];
  g[0] += Complex(0, -1) * scale[0] * fields[0];
  g[n * n - 1] += Complex(0, -1) * scale[1] * fields[1];
  const auto expected = testing_support::matvec(g, psi);
  CHECK(testing_support::max_abs_diff(rhs(psi, f.h0, law, scale), expected) < 1e-13);
}

TEST_CASE("free evolution matches the spectral solution") {
  Fixture f;
  const auto law = f.v2().scaled(0.0);
  const auto psi0 = basis_state(f.n(), 3);
  IntegratorParams p;
  p.dt = 0.01;
  p.t_max = 50.0;
  p.renormalize = false;
  const auto traj = evolve(f.h0, law, psi0, p);
  StateVector exact(f.n());
  for (std::size_t k = 0; k < f.n(); ++k) {
    const auto& v = f.basis->eigenvectors[k];
    const Complex a = inner(v, psi0) * std::exp(Complex(0, -f.basis->eigenvalues[k] * 50.0));
    for (std::size_t j = 0; j < f.n(); ++j) exact[j] += a * v[j];
  }
  CHECK(testing_support::max_abs_diff(traj.final_state, exact) < 1e-7);
}

TEST_CASE("zero gains from an eigenstate keep the fidelity constant") {
  Fixture f;
  const auto law = f.v1().scaled(0.0);
  IntegratorParams p;
  p.t_max = 100.0;
  p.record_stride = 50;
  const auto traj = evolve(f.h0, law, to_complex(f.pair.right_state), p);
  for (double fid : traj.fidelity_target) CHECK(std::abs(fid - 1.0) < 1e-12);
  for (double x : traj.fields[0]) CHECK(x == 0.0);
}

TEST_CASE("RK4 converges at fourth order under feedback") {
  Fixture f;
  const auto law = f.v2();
  const auto psi0 = basis_state(f.n(), 3);
  auto run = [&](double dt) {
    IntegratorParams p;
    p.dt = dt;
    p.t_max = 20.0;
    p.renormalize = false;
    p.record_stride = 1000000;
    return evolve(f.h0, law, psi0, p).final_state;
  };
  const auto reference = run(0.0025);
  const double e1 = testing_support::max_abs_diff(run(0.04), reference);
  const double e2 = testing_support::max_abs_diff(run(0.02), reference);
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.6);
  CHECK(order < 4.4);
}

TEST_CASE("Lyapunov functions are non-increasing along trajectories") {
  Fixture f;
  for (const auto& law : {f.v1(), f.v2(), f.v3()}) {
    IntegratorParams p;
    p.t_max = 1000.0;
    p.record_stride = 10;
    const auto traj = evolve(f.h0, law, basis_state(f.n(), 3), p);
    double worst = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i)
      worst = std::max(worst, traj.lyapunov[i] - traj.lyapunov[i - 1]);
    INFO("law " << to_string(law.kind()));
    CHECK(worst <= 1e-8);
    CHECK(traj.max_norm_drift <= 1e-8);
    CHECK(traj.lyapunov.back() < traj.lyapunov.front());
  }
}

TEST_CASE("edge-1 amplitude is nearly conserved under V1") {
  Fixture f;
  IntegratorParams p;
  p.t_max = 1000.0;
  RecordOptions rec;
  rec.edges = &f.pair;
  const auto traj = evolve(f.h0, f.v1(), basis_state(f.n(), 3), p, rec);
  REQUIRE(traj.a_edge1_sq.size() == traj.size());
  double drift = 0.0;
  for (double a : traj.a_edge1_sq) drift = std::max(drift, std::abs(a - traj.a_edge1_sq.front()));
  CHECK(drift <= 1e-3);
  CHECK(traj.fidelity_edge1.size() == traj.size());
}

TEST_CASE("early stop and threshold crossing") {
  Fixture f;
  IntegratorParams p;
  p.t_max = 1000.0;
  p.stop_fidelity = 0.9;
  const auto traj = evolve(f.h0, f.v2(), basis_state(f.n(), 3), p);
  CHECK(traj.stopped_early);
  CHECK(traj.final_fidelity() >= 0.9);
  CHECK(traj.final_time < 1000.0);
  const auto t = time_to_fidelity(traj, 0.9);
  REQUIRE(t.has_value());
  CHECK(*t <= traj.final_time);
  CHECK(*t > traj.times[traj.size() - 2]);

  const RealVector times{0, 1, 2, 3};
  const RealVector fid{0.1, 0.5, 0.7, 0.9};
  CHECK(*time_to_fidelity(times, fid, 0.6) == doctest::Approx(1.5));
  CHECK(*time_to_fidelity(times, fid, 0.1) == 0.0);
  CHECK_FALSE(time_to_fidelity(times, fid, 0.95).has_value());
}

TEST_CASE("recorded series line up") {
  Fixture f;
  IntegratorParams p;
  p.t_max = 10.05;
  p.record_stride = 500;
  p.store_states = true;
  RecordOptions rec;
  rec.concurrence = true;
  rec.eigenbasis = f.basis.get();
  const auto traj = evolve(f.h0, f.v3(), basis_state(f.n(), 3), p, rec);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(10.05));
  CHECK(traj.size() == 4);  // steps 0, 500, 1000, 1005
  CHECK(traj.states.size() == traj.size());
  CHECK(traj.concurrence.size() == traj.size());
  CHECK(traj.eigen_populations.size() == traj.size());
  double total = 0.0;
  for (double x : traj.eigen_populations.back()) total += x;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("numerical guards") {
  Fixture f;
  IntegratorParams p;
  p.dt = 0.2;
  p.t_max = 10.0;
  CHECK_THROWS_AS(evolve(f.h0, f.v2().scaled(100.0), basis_state(f.n(), 3), p), StabilityError);

  StateVector bad = basis_state(f.n(), 3);
  bad[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(evolve(f.h0, f.v2(), bad, IntegratorParams{}), NumericalError);
}

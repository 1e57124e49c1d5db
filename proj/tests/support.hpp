#pragma once

// Helpers shared by the test binaries. Random states here come from the
// standard library distributions, independent of edgectl::Rng.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "edgectl/types.hpp"

namespace testing_support {

using edgectl::Complex;
using edgectl::StateVector;

inline StateVector random_state(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> g;
  StateVector v(n);
  double s = 0.0;
  for (auto& c : v) {
    c = {g(gen), g(gen)};
    s += std::norm(c);
  }
  for (auto& c : v) c /= std::sqrt(s);
  return v;
}

inline double max_abs_diff(const StateVector& a, const StateVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Dense complex matrix-vector product, row-major.
inline StateVector matvec(const std::vector<Complex>& m, const StateVector& v) {
  const std::size_t n = v.size();
  StateVector out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += m[i * n + j] * v[j];
  return out;
}

}  // namespace testing_support

#include "edgectl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace edgectl {

namespace {

// QL with implicit Wilkinson shifts. `d` holds the diagonal, `e[i]` couples
// i and i+1 with e[n-1] == 0 on entry. On exit d holds eigenvalues and the
// columns of z (row-major n*n) have been rotated into eigenvectors.
void ql_implicit(RealVector& d, RealVector& e, std::vector<double>& z, std::size_t n,
                 int max_iterations) {
  const double eps = std::numeric_limits<double>::epsilon();
  const int nn = static_cast<int>(n);
  for (int l = 0; l < nn; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < nn - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (iter++ == max_iterations)
        throw NumericalError("tridiagonal QL did not converge for eigenvalue " + std::to_string(l));

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      int i = m - 1;
      bool underflow = false;
      for (; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        for (std::size_t k = 0; k < n; ++k) {
          double* row = &z[k * n];
          f = row[i + 1];
          row[i + 1] = s * row[i] + c * f;
          row[i] = c * row[i] - s * f;
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

SymmetricEigen sorted_result(RealVector& d, const std::vector<double>& z, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.assign(n, RealVector(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t col = order[i];
    out.values[i] = d[col];
    for (std::size_t k = 0; k < n; ++k) out.vectors[i][k] = z[k * n + col];
  }
  return out;
}

// Householder reduction of the symmetric matrix `a` (row-major, overwritten
// with the accumulated orthogonal transform). d gets the diagonal, e[i] the
// coupling between i-1 and i (e[0] = 0).
void householder_tridiagonalize(std::vector<double>& a, std::size_t n, RealVector& d,
                                RealVector& e) {
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k < i; ++k) scale += std::abs(A(i, k));
      if (scale == 0.0) {
        e[i] = A(i, l);
      } else {
        for (std::size_t k = 0; k < i; ++k) {
          A(i, k) /= scale;
          h += A(i, k) * A(i, k);
        }
        double f = A(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        A(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
          A(j, i) = A(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
          for (std::size_t k = j + 1; k < i; ++k) g += A(k, j) * A(i, k);
          e[j] = g / h;
          f += e[j] * A(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j < i; ++j) {
          f = A(i, j);
          g = e[j] - hh * f;
          e[j] = g;
          for (std::size_t k = 0; k <= j; ++k) A(j, k) -= f * e[k] + g * A(i, k);
        }
      }
    } else {
      e[i] = A(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += A(i, k) * A(k, j);
        for (std::size_t k = 0; k < i; ++k) A(k, j) -= g * A(k, i);
      }
    }
    d[i] = A(i, i);
    A(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      A(j, i) = 0.0;
      A(i, j) = 0.0;
    }
  }
}

}  // namespace

SymmetricEigen tridiagonal_eigen(const RealVector& diag, const RealVector& off,
                                 int max_iterations) {
  const std::size_t n = diag.size();
  if (n == 0 || off.size() + 1 != n) throw ConfigError("tridiagonal band sizes are inconsistent");
  RealVector d = diag;
  RealVector e(n, 0.0);
  std::copy(off.begin(), off.end(), e.begin());
  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  ql_implicit(d, e, z, n, max_iterations);
  return sorted_result(d, z, n);
}

SymmetricEigen symmetric_eigen(std::span<const double> matrix, std::size_t n,
                               int max_iterations) {
  if (matrix.size() != n * n || n == 0) throw ConfigError("matrix is not n*n");
  std::vector<double> a(matrix.begin(), matrix.end());
  RealVector d, e;
  householder_tridiagonalize(a, n, d, e);
  // Shift the subdiagonal into the e[i] ~ (i, i+1) convention.
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  ql_implicit(d, e, a, n, max_iterations);
  return sorted_result(d, a, n);
}

void canonicalize_phase(RealVector& v) {
  double largest = 0.0;
  for (double x : v) largest = std::max(largest, std::abs(x));
  if (largest == 0.0) return;
  const double tie = largest * (1.0 - 1e-12);
  for (double x : v) {
    if (std::abs(x) >= tie) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

SpectralDecomposition eigendecompose(const HamiltonianMatrix& h) {
  auto eig = tridiagonal_eigen(h.diagonal(), h.offdiagonal());
  SpectralDecomposition out;
  out.eigenvalues = std::move(eig.values);
  out.eigenvectors = std::move(eig.vectors);
  for (auto& v : out.eigenvectors) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    canonicalize_phase(v);
  }
  return out;
}

double boundary_weight(std::span<const double> v) {
  return v.front() * v.front() + v.back() * v.back();
}

double boundary_weight(std::span<const Complex> v) {
  return std::norm(v.front()) + std::norm(v.back());
}

namespace {

EdgePair make_pair(RealVector a, RealVector b, std::size_t ia, std::size_t ib, double ea,
                   double eb, bool remixed) {
  const double a_first = a.front() * a.front();
  const double a_last = a.back() * a.back();
  EdgePair p;
  if (a_first > a_last) {
    p.left_state = std::move(a);
    p.right_state = std::move(b);
    p.left_index = ia;
    p.right_index = ib;
    p.left_energy = ea;
    p.right_energy = eb;
  } else {
    p.left_state = std::move(b);
    p.right_state = std::move(a);
    p.left_index = ib;
    p.right_index = ia;
    p.left_energy = eb;
    p.right_energy = ea;
  }
  p.left_boundary_probability = p.left_state.front() * p.left_state.front();
  p.right_boundary_probability = p.right_state.back() * p.right_state.back();
  p.remixed = remixed;
  return p;
}

}  // namespace

EdgePair identify_edge_states(const SpectralDecomposition& d, EdgeDetection options) {
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < d.dimension(); ++i)
    if (boundary_weight(d.eigenvectors[i]) > options.threshold) picked.push_back(i);

  if (picked.empty())
    throw EdgeStateError(EdgeStateError::Kind::not_found,
                         "no edge states found above boundary weight threshold");
  if (picked.size() > 2)
    throw EdgeStateError(EdgeStateError::Kind::ambiguous,
                         std::to_string(picked.size()) + " states exceed the edge threshold");
  if (picked.size() == 1)
    throw EdgeStateError(EdgeStateError::Kind::not_found,
                         "only one boundary-localized state found");

  const std::size_t i = picked[0], j = picked[1];
  RealVector u = d.eigenvectors[i];
  RealVector v = d.eigenvectors[j];
  const double ei = d.eigenvalues[i], ej = d.eigenvalues[j];

  auto two_ended = [](const RealVector& x) {
    const double lo = std::min(x.front() * x.front(), x.back() * x.back());
    return lo > 0.1 * boundary_weight(x);
  };
  if (std::abs(ei - ej) < options.degeneracy_tolerance && two_ended(u) && two_ended(v)) {
    // Rotate within the degenerate plane: the combination parallel to
    // (u_1, v_1) maximizes the site-1 weight, its complement vanishes there.
    const double u1 = u.front(), v1 = v.front();
    const double r = std::hypot(u1, v1);
    RealVector left(u.size()), right(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      left[k] = (u1 * u[k] + v1 * v[k]) / r;
      right[k] = (-v1 * u[k] + u1 * v[k]) / r;
    }
    canonicalize_phase(left);
    canonicalize_phase(right);
    const double e_mid = 0.5 * (ei + ej);
    return make_pair(std::move(left), std::move(right), i, j, e_mid, e_mid, true);
  }
  return make_pair(std::move(u), std::move(v), i, j, ei, ej, false);
}

EdgePair label_edge_states(SpectralDecomposition& d, EdgeDetection options) {
  EdgePair pair = identify_edge_states(d, options);
  d.edge_left = pair.left_index;
  d.edge_right = pair.right_index;
  return pair;
}

double edge_tail_epsilon(const EdgePair& pair) {
  return std::max(std::abs(pair.right_state.front()), std::abs(pair.left_state.back()));
}

}  // namespace edgectl

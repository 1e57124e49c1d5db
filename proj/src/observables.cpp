#include "edgectl/observables.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace edgectl {

double fidelity(std::span<const Complex> psi, std::span<const Complex> phi) {
  if (psi.size() != phi.size()) throw ConfigError("fidelity of states with different dimension");
  return std::abs(inner(psi, phi));
}

StateVector eigen_amplitudes(std::span<const Complex> psi, const SpectralDecomposition& d) {
  StateVector a(d.dimension());
  for (std::size_t i = 0; i < d.dimension(); ++i) a[i] = inner(d.eigenvectors[i], psi);
  return a;
}

StateVector reconstruct(std::span<const Complex> amplitudes, const SpectralDecomposition& d) {
  StateVector psi(d.dimension(), Complex{0.0, 0.0});
  for (std::size_t i = 0; i < d.dimension(); ++i)
    for (std::size_t j = 0; j < d.dimension(); ++j) psi[j] += amplitudes[i] * d.eigenvectors[i][j];
  return psi;
}

Matrix4 BoundaryDensityBlock::dense() const {
  Matrix4 m{};
  m[0] = a;
  m[5] = b;
  m[6] = d;
  m[9] = std::conj(d);
  m[10] = c;
  return m;
}

BoundaryDensityBlock reduced_density_1N(std::span<const Complex> psi) {
  if (psi.size() < 3) throw ConfigError("reduced density needs at least 3 sites");
  BoundaryDensityBlock block;
  for (std::size_t n = 1; n + 1 < psi.size(); ++n) block.a += std::norm(psi[n]);
  block.b = std::norm(psi.front());
  block.c = std::norm(psi.back());
  block.d = psi.front() * std::conj(psi.back());
  return block;
}

double concurrence(const BoundaryDensityBlock& block) {
  constexpr double tol = 1e-10;
  if (block.a < -tol || block.b < -tol || block.c < -tol ||
      std::norm(block.d) > block.b * block.c + tol)
    throw ConfigError("boundary density block is not positive semidefinite");
  const double bc = std::max(block.b, 0.0) * std::max(block.c, 0.0);
  return std::max({0.0, 2.0 * std::sqrt(bc), 2.0 * std::abs(block.d)});
}

namespace {

// Complex Hermitian n*n <-> real symmetric 2n*2n embedding [[Re, -Im], [Im, Re]].
// Each eigenvalue of the Hermitian matrix appears twice.
std::vector<double> embed(std::span<const Complex> h, std::size_t n) {
  const std::size_t m = 2 * n;
  std::vector<double> out(m * m);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const Complex z = h[r * n + c];
      out[r * m + c] = z.real();
      out[r * m + c + n] = -z.imag();
      out[(r + n) * m + c] = z.imag();
      out[(r + n) * m + c + n] = z.real();
    }
  }
  return out;
}

std::vector<Complex> unembed(std::span<const double> e, std::size_t n) {
  const std::size_t m = 2 * n;
  std::vector<Complex> out(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = {e[r * m + c], e[(r + n) * m + c]};
  return out;
}

std::vector<Complex> matmul(std::span<const Complex> a, std::span<const Complex> b,
                            std::size_t n) {
  std::vector<Complex> out(n * n, Complex{0.0, 0.0});
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t c = 0; c < n; ++c) out[r * n + c] += a[r * n + k] * b[k * n + c];
  return out;
}

// Principal square root of a positive semidefinite Hermitian matrix.
// Eigenvalues below a relative cutoff are treated as exact zeros; sqrt is not
// Lipschitz at 0 and rounding noise there would otherwise surface as
// O(sqrt(eps)) spurious singular values.
std::vector<Complex> psd_sqrt(std::span<const Complex> h, std::size_t n) {
  const std::size_t m = 2 * n;
  const auto eig = symmetric_eigen(embed(h, n), m);
  double scale = 0.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));
  const double cutoff = 1e-13 * std::max(scale, 1e-300);
  std::vector<double> root(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double lambda = eig.values[i];
    if (lambda <= cutoff) continue;
    const double s = std::sqrt(lambda);
    const RealVector& v = eig.vectors[i];
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) root[r * m + c] += s * v[r] * v[c];
  }
  return unembed(root, n);
}

}  // namespace

double wootters_concurrence(const Matrix4& rho) {
  constexpr std::size_t n = 4;
  // sy x sy in the {|00>, |10>, |01>, |11>} ordering is the anti-diagonal
  // (-1, 1, 1, -1) pattern; conjugating by it reverses indices with signs.
  const std::array<double, 4> sign{-1.0, 1.0, 1.0, -1.0};
  auto flip = [&](std::span<const Complex> m) {
    std::vector<Complex> out(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        out[r * n + c] = sign[r] * sign[c] * std::conj(m[(n - 1 - r) * n + (n - 1 - c)]);
    return out;
  };

  const auto root = psd_sqrt(rho, n);
  const auto root_tilde = flip(root);  // sqrt(rho~) = (sy x sy) sqrt(rho)* (sy x sy)
  const auto x = matmul(root, root_tilde, n);

  // The l_i are the singular values of x; read them off the Hermitian
  // dilation [[0, x], [x^dag, 0]] whose spectrum is {+-s_i}.
  std::vector<Complex> dilation(4 * n * n, Complex{0.0, 0.0});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      dilation[r * 2 * n + (c + n)] = x[r * n + c];
      dilation[(c + n) * 2 * n + r] = std::conj(x[r * n + c]);
    }
  }
  auto eig = symmetric_eigen(embed(dilation, 2 * n), 4 * n);
  std::vector<double> values = eig.values;
  std::sort(values.begin(), values.end(), std::greater<>());
  // Each singular value appears twice among the positive half.
  std::array<double, 4> l{};
  for (std::size_t i = 0; i < 4; ++i) l[i] = std::abs(values[2 * i]);
  std::sort(l.begin(), l.end(), std::greater<>());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

}  // namespace edgectl

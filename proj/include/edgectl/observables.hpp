#pragma once

#include <array>

#include "edgectl/spectral.hpp"
#include "edgectl/types.hpp"

namespace edgectl {

/// |<psi|phi>|
double fidelity(std::span<const Complex> psi, std::span<const Complex> phi);

/// a_i = <lambda_i|psi> in spectral order.
StateVector eigen_amplitudes(std::span<const Complex> psi, const SpectralDecomposition& d);
/// sum_i a_i |lambda_i>
StateVector reconstruct(std::span<const Complex> amplitudes, const SpectralDecomposition& d);

using Matrix4 = std::array<Complex, 16>;  // row-major

/// Two-site reduced state of sites 1 and N in the basis
/// {|00>, |10>, |01>, |11>}; the |11> population is zero in the
/// single-excitation sector.
struct BoundaryDensityBlock {
  double a = 0.0;  // sum_{n=2}^{N-1} |C_n|^2
  double b = 0.0;  // |C_1|^2
  double c = 0.0;  // |C_N|^2
  Complex d{0.0, 0.0};  // C_1 conj(C_N)

  Matrix4 dense() const;
};

BoundaryDensityBlock reduced_density_1N(std::span<const Complex> psi);

/// max{0, 2 sqrt(bc), 2|d|}. Throws ConfigError when the block is not
/// positive semidefinite within 1e-10.
double concurrence(const BoundaryDensityBlock& block);

/// Wootters concurrence of an arbitrary two-qubit density matrix:
/// max{0, l1 - l2 - l3 - l4}, l_i the decreasing square roots of the
/// eigenvalues of rho (sy x sy) rho* (sy x sy).
double wootters_concurrence(const Matrix4& rho);

}  // namespace edgectl

#pragma once

#include <optional>
#include <vector>

#include "edgectl/lattice.hpp"
#include "edgectl/types.hpp"

namespace edgectl {

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
/// vectors[i] is the eigenvector belonging to values[i].
struct SymmetricEigen {
  RealVector values;
  std::vector<RealVector> vectors;
};

/// Implicit-shift QL on a symmetric tridiagonal matrix. `off[i]` couples
/// rows i and i+1. Throws NumericalError if an eigenvalue needs more than
/// `max_iterations` sweeps.
SymmetricEigen tridiagonal_eigen(const RealVector& diag, const RealVector& off,
                                 int max_iterations = 60);

/// Dense real symmetric eigenproblem (row-major n*n): Householder reduction
/// to tridiagonal form followed by the same QL iteration.
SymmetricEigen symmetric_eigen(std::span<const double> matrix, std::size_t n,
                               int max_iterations = 60);

/// Flips the sign so the largest-magnitude component is positive; ties go
/// to the lowest index.
void canonicalize_phase(RealVector& v);

/// Eigen-decomposition of H0 with phase-canonical eigenvectors.
struct SpectralDecomposition {
  RealVector eigenvalues;
  std::vector<RealVector> eigenvectors;  // eigenvectors[i][j] = b_{j,i}
  std::optional<std::size_t> edge_left;
  std::optional<std::size_t> edge_right;

  std::size_t dimension() const { return eigenvalues.size(); }
};

SpectralDecomposition eigendecompose(const HamiltonianMatrix& h);

/// |v_1|^2 + |v_N|^2.
double boundary_weight(std::span<const double> v);
double boundary_weight(std::span<const Complex> v);

struct EdgePair {
  RealVector left_state;   // |Edge_1>
  RealVector right_state;  // |Edge_N>
  double left_boundary_probability = 0.0;   // |<1|Edge_1>|^2
  double right_boundary_probability = 0.0;  // |<N|Edge_N>|^2
  std::size_t left_index = 0;   // spectral index the left state came from
  std::size_t right_index = 0;
  double left_energy = 0.0;
  double right_energy = 0.0;
  bool remixed = false;  // true when a near-degenerate pair was rotated
};

struct EdgeDetection {
  double threshold = 0.5;
  double degeneracy_tolerance = 1e-8;
};

/// Picks the eigenstates with boundary weight above threshold and labels
/// them by the end they occupy. Throws EdgeStateError when none or more than
/// two qualify.
EdgePair identify_edge_states(const SpectralDecomposition& d, EdgeDetection options = {});

/// Same as identify_edge_states, and records the labels on `d`.
EdgePair label_edge_states(SpectralDecomposition& d, EdgeDetection options = {});

/// Residual amplitude of each edge state at the opposite boundary.
double edge_tail_epsilon(const EdgePair& pair);

}  // namespace edgectl

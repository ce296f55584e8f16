#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "core/hamiltonian.hpp"

namespace moire {

enum class SolvePath { Auto, Dense, Iterative };

struct SolverOptions {
  int m = 1;                  // number of lowest eigenpairs
  double tol = 1e-9;          // residual norm target per pair (iterative path)
  int max_iter = 500;         // block iterations before declaring failure
  SolvePath path = SolvePath::Auto;
  std::size_t dense_cap = 4096;
  std::size_t auto_dense_threshold = 1024;  // Auto picks Dense at or below this
  std::uint64_t seed = 0x6d6f697265u;       // starting-block stream key
};

struct EigenResult {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // orthonormal columns over the basis
  Eigen::VectorXd residual_norms; // ||H x - lambda x|| per pair
  int iterations = 0;
  SolvePath path_taken = SolvePath::Dense;
};

/// m lowest eigenpairs of the fiber operator.
///
/// Dense path: full Hermitian eigendecomposition of assemble_dense, truncated
/// to m, with eigenvalues refined by extended-precision Rayleigh quotients
/// (keeps variational comparisons meaningful at the 1e-12 level).
///
/// Iterative path: block Rayleigh-quotient minimization (LOBPCG-type [X W P]
/// subspace iteration) with a kinetic-diagonal-plus-shift preconditioner,
/// deterministic seeded start, hard lock on converged pairs. Throws
/// SolverError carrying the best residuals on non-convergence.
EigenResult lowest_eigenpairs(const BlochHamiltonian& h, const SolverOptions& opt);

/// Ascending eigenvalues of a dense Hermitian matrix with the same
/// extended-precision refinement as the dense path above. Oracle helper.
Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXcd& mat, int m = -1);

}  // namespace moire

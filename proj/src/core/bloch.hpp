#pragma once

#include <complex>
#include <vector>

#include "core/eigensolve.hpp"

namespace moire {

/// One Bloch eigenpair of the regularized fiber: coefficients v~(m,n) over
/// the basis, unit 2-norm.
struct BlochSolution {
  std::shared_ptr<const PlanewaveBasis> basis;
  KPoint k;
  double delta = 0.0;
  double lambda = 0.0;
  Eigen::VectorXcd coeffs;

  static BlochSolution from_eigenpair(std::shared_ptr<const PlanewaveBasis> basis,
                                      const KPoint& k, double delta, double lambda,
                                      Eigen::VectorXcd coeffs);
};

struct QpTerm {
  Eigen::VectorXd omega;  // Cartesian frequency on R^d
  Cplx amplitude;
};

struct Provenance {
  KPoint k;
  double delta = 0.0;
  double lambda = 0.0;
};

/// Finite trigonometric sum sum_j c_j exp(i omega_j . r) with pairwise
/// distinct frequencies (within the merge tolerance used to build it).
struct QuasiPeriodicFunction {
  std::vector<QpTerm> terms;
  Provenance provenance;
};

/// Restriction of the Bloch solution to the diagonal r' = r:
/// term per basis entry at omega = k + k' + G1 + G2 with amplitude v~(m,n).
/// Frequencies colliding within merge_tol (possible only in commensurate
/// configurations) have their amplitudes summed.
QuasiPeriodicFunction reconstruct_diagonal(const BlochSolution& sol,
                                           double merge_tol = 1e-9);

Cplx evaluate_qp(const QuasiPeriodicFunction& f, const Eigen::VectorXd& r);

/// Certification data for one Bloch-type solution. The mean-square residual
/// is computed exactly in frequency space (almost-periodic Parseval); ball
/// values at finite R are appended by ball_residual callers.
struct ResidualReport {
  double relative_ms_residual = 0.0;
  double bound = 0.0;  // (delta/2) * max over support of |k-k'+G1-G2|^2
  std::vector<std::pair<double, double>> ball_residuals;  // (R, value)
  double lambda = 0.0;
  double delta = 0.0;
  bool exact = true;  // false when commensurate frequency collisions merged
};

/// (H - lambda) applied to the diagonal restriction has frequency-space
/// coefficients -(delta/2)|k-k'+G1-G2|^2 v~(m,n); the report carries
/// sqrt(sum |c_res|^2)/sqrt(sum |v~|^2) after frequency merging.
ResidualReport exact_residual(const BlochSolution& sol, double merge_tol = 1e-9);

/// Quadrature counterpart on the ball B_R: sqrt of
/// int_{B_R} |(H-lambda)u|^2 / int_{B_R} |u|^2 by midpoint rule. Errors out
/// when quad_points_per_unit undersamples the squared integrand (Nyquist).
/// The quadrature parallel-maps over fixed chunks, so the value is identical
/// for any worker count.
double ball_residual(const BlochSolution& sol, double radius, int quad_points_per_unit,
                     int workers = 0);

/// sup_{x in A} inf_{y in B} of a norm-equivalent H^{s-d/2}(B_K) surrogate:
/// quadrature of derivatives up to ceil(s-d/2) with linear interpolation
/// between integer orders. Empty B gives +infinity.
double solution_set_distance(const std::vector<QuasiPeriodicFunction>& set_a,
                             const std::vector<QuasiPeriodicFunction>& set_b,
                             double ball_radius, double s);

/// Deterministic phase gauge: rotates so the largest-|c| coefficient (lowest
/// index on ties) is real and nonnegative. Used when comparing solution sets.
Eigen::VectorXcd canonical_gauge(const Eigen::VectorXcd& coeffs);

}  // namespace moire

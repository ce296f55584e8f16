#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/eigensolve.hpp"

namespace moire {

/// Basis request independent of the fiber. Box bases are shared across all
/// fibers; EnergyCut bases are rebuilt per (k~, delta) since the cut region
/// moves with the fiber.
struct BasisSpec {
  enum class Kind { Box, EnergyCut };
  Kind kind = Kind::Box;
  int radius1 = 4;
  int radius2 = 4;
  double ecut = 0.0;
};

std::shared_ptr<const PlanewaveBasis> make_basis(const ProductCell& cell,
                                                 const BasisSpec& spec,
                                                 const KPoint& k, double delta);

/// lambda_j^delta(k~) over a k~-grid at fixed delta. Row order follows the
/// k-point order regardless of the execution schedule.
struct BandStructure {
  std::vector<KPoint> kpoints;
  double delta = 0.0;
  Eigen::MatrixXd bands;  // rows = k-points, cols = band index
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Union of sampled band ranges; `delta` empty means extrapolated to 0+.
struct SpectrumEstimate {
  std::vector<Interval> intervals;
  std::optional<double> delta;
  long coverage = 0;  // k-points sampled
};

/// The delta-ladder at one k~ with the linear extrapolation toward 0+.
/// Rung failures are recorded and leave NaN rows; the fit uses the smallest
/// three successful rungs.
struct ContinuationTable {
  KPoint k;
  std::vector<double> deltas;  // strictly descending
  Eigen::MatrixXd values;      // rows = rungs, cols = bands
  Eigen::VectorXd extrapolated;
  Eigen::VectorXd fit_slope;
  Eigen::VectorXd fit_residual;  // rms misfit over the fitted rungs
  std::vector<std::pair<int, int>> crossing_warnings;  // (rung, band)
  std::vector<std::pair<int, std::string>> failed_rungs;
};

struct SweepProblem {
  ProductCell cell;
  std::shared_ptr<const FourierPotential> v1, v2;
  BasisSpec basis;
  SolverOptions solver;
  std::uint64_t seed_base = 0;
  int workers = 1;
};

BandStructure band_structure(const SweepProblem& prob, double delta,
                             const std::vector<KPoint>& kpts, int delta_index = 0);

SpectrumEstimate spectrum_union(const BandStructure& bs);

ContinuationTable delta_continuation(const SweepProblem& prob, const KPoint& k,
                                     const std::vector<double>& ladder,
                                     int k_index = 0);

/// Runs the ladder at every grid point and unions the extrapolated bands.
/// Per-point solver failures are collected and reported together.
SpectrumEstimate spectrum_at_zero(const SweepProblem& prob,
                                  const std::vector<KPoint>& kpts,
                                  const std::vector<double>& ladder);

/// Complement intervals between consecutive spectrum intervals.
std::vector<Interval> spectrum_gaps(const SpectrumEstimate& est);

}  // namespace moire

#pragma once

#include <memory>
#include <vector>

#include "core/potential.hpp"
#include "core/sweep.hpp"

namespace moire {

enum class Boundary { Periodic, Dirichlet };

/// Finite-difference discretization of -1/2 Lap + V1 + V2 on [-L/2, L/2]^d.
/// Independent of the planewave path end to end; exists to catch wrong
/// answers, not to compete. d=1 is the contractual oracle; d=2 downgrades to
/// coarse dense grids.
struct RealSpaceProblem {
  int dim = 1;
  double length = 100.0;  // L per axis; L/h must be an integer
  double spacing = 0.01;  // h
  Boundary boundary = Boundary::Dirichlet;
  std::shared_ptr<const FourierPotential> v1, v2;

  // Dirichlet walls host edge-localized states inside spectral gaps; states
  // with at least `edge_mass_threshold` of their mass within
  // `edge_margin_fraction * L` of a wall are dropped from the reported list.
  double edge_margin_fraction = 0.05;
  double edge_mass_threshold = 0.5;

  std::size_t max_dense_nodes = 4096;  // cap for the dense (periodic / d=2) paths
};

/// m lowest eigenvalues of the 3-point (d=1) / 5-point (d=2) discretization.
std::vector<double> realspace_spectrum(const RealSpaceProblem& p, int m);

/// Hausdorff distance between a point set and an interval set after clipping
/// both to [lo, hi]. Point-to-set distance is distance to the nearest
/// interval; interval-to-points suprema are attained at endpoints or at
/// midpoints between consecutive points.
double hausdorff_window(const std::vector<double>& points,
                        const std::vector<Interval>& intervals, double lo, double hi);

/// Leading-order kinetic dispersion error of the 3-point stencil at energy
/// emax; callers compare it against their tolerance before trusting h.
double fd_dispersion_error(double h, double emax);

}  // namespace moire

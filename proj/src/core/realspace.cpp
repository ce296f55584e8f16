#include "core/realspace.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace moire {

namespace {

long checked_node_count(const RealSpaceProblem& p) {
  const double ratio = p.length / p.spacing;
  const long n = std::lround(ratio);
  if (n < 2 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("real-space grid requires L/h to be an integer >= 2");
  return n;
}

double potential_at(const RealSpaceProblem& p, const Eigen::VectorXd& x) {
  return p.v1->evaluate(x) + p.v2->evaluate(x);
}

// d=1 Dirichlet: symmetric tridiagonal, selected eigenpairs via LAPACK stevr.
// Eigenvectors are needed only to identify wall-localized states.
std::vector<double> dirichlet_1d(const RealSpaceProblem& p, int m) {
  const long n_cells = checked_node_count(p);
  const long n = n_cells - 1;  // interior nodes
  if (m > n) throw ConfigError("realspace_spectrum: m exceeds grid size");

  const double h = p.spacing;
  const double off = -0.5 / (h * h);
  std::vector<double> diag(n), offd(n > 1 ? n - 1 : 0, off);
  Eigen::VectorXd x(1);
  for (long i = 0; i < n; ++i) {
    x[0] = -0.5 * p.length + (i + 1) * h;
    diag[i] = 1.0 / (h * h) + potential_at(p, x);
  }

  // request extra pairs so edge-state filtering can still return m values
  const int slack = 64;
  const int want = static_cast<int>(std::min<long>(n, m + slack));

  std::vector<double> w(n);
  std::vector<double> z(static_cast<std::size_t>(n) * want);
  std::vector<lapack_int> isuppz(2 * std::max(1, want));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(n), diag.data(), offd.data(),
      0.0, 0.0, 1, want, 0.0, &found, w.data(), z.data(), static_cast<lapack_int>(n),
      isuppz.data());
  if (info != 0) throw SolverError("LAPACK dstevr failed with info=" + std::to_string(info));
  if (found < want) throw SolverError("LAPACK dstevr returned fewer eigenpairs than requested");

  const long margin_nodes =
      std::lround(p.edge_margin_fraction * static_cast<double>(n_cells));
  std::vector<double> kept;
  kept.reserve(m);
  for (int j = 0; j < found && static_cast<int>(kept.size()) < m; ++j) {
    const double* col = z.data() + static_cast<std::size_t>(j) * n;
    double edge = 0.0, total = 0.0;
    for (long i = 0; i < n; ++i) {
      const double sq = col[i] * col[i];
      total += sq;
      if (i < margin_nodes || i >= n - margin_nodes) edge += sq;
    }
    if (edge / total >= p.edge_mass_threshold) continue;  // wall-localized
    kept.push_back(w[j]);
  }
  if (static_cast<int>(kept.size()) < m)
    throw SolverError("realspace_spectrum: edge filtering left fewer than m states; "
                      "raise m slack or lower the margin");
  return kept;
}

// dense fallback: d=1 periodic and all d=2 cases
std::vector<double> dense_fd(const RealSpaceProblem& p, int m) {
  const long n_cells = checked_node_count(p);
  const double h = p.spacing;
  const double off = -0.5 / (h * h);

  long n = 0;
  Eigen::MatrixXd mat;
  if (p.dim == 1) {
    n = (p.boundary == Boundary::Periodic) ? n_cells : n_cells - 1;
    if (static_cast<std::size_t>(n) > p.max_dense_nodes)
      throw ConfigError("real-space dense path exceeds the node cap (" +
                        std::to_string(p.max_dense_nodes) + ")");
    mat = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd x(1);
    for (long i = 0; i < n; ++i) {
      x[0] = -0.5 * p.length +
             (p.boundary == Boundary::Periodic ? i : i + 1) * h;
      mat(i, i) = 1.0 / (h * h) + potential_at(p, x);
      const long up = i + 1;
      if (up < n) mat(i, up) = mat(up, i) = off;
    }
    if (p.boundary == Boundary::Periodic && n > 2) mat(0, n - 1) = mat(n - 1, 0) = off;
  } else {
    const long per_axis = (p.boundary == Boundary::Periodic) ? n_cells : n_cells - 1;
    n = per_axis * per_axis;
    if (static_cast<std::size_t>(n) > p.max_dense_nodes)
      throw ConfigError("real-space d=2 grid exceeds the node cap (" +
                        std::to_string(p.max_dense_nodes) + "); coarsen h or shrink L");
    mat = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd x(2);
    auto node = [&](long i, long j) { return i * per_axis + j; };
    for (long i = 0; i < per_axis; ++i)
      for (long j = 0; j < per_axis; ++j) {
        const long row = node(i, j);
        x[0] = -0.5 * p.length + (p.boundary == Boundary::Periodic ? i : i + 1) * h;
        x[1] = -0.5 * p.length + (p.boundary == Boundary::Periodic ? j : j + 1) * h;
        mat(row, row) = 2.0 / (h * h) + potential_at(p, x);
        auto couple = [&](long i2, long j2) {
          if (p.boundary == Boundary::Periodic) {
            i2 = (i2 + per_axis) % per_axis;
            j2 = (j2 + per_axis) % per_axis;
          } else if (i2 < 0 || i2 >= per_axis || j2 < 0 || j2 >= per_axis) {
            return;
          }
          mat(row, node(i2, j2)) += off;
        };
        couple(i + 1, j);
        couple(i - 1, j);
        couple(i, j + 1);
        couple(i, j - 1);
      }
  }
  if (m > n) throw ConfigError("realspace_spectrum: m exceeds grid size");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("dense FD eigendecomposition failed");
  std::vector<double> vals(es.eigenvalues().data(), es.eigenvalues().data() + m);
  return vals;
}

}  // namespace

std::vector<double> realspace_spectrum(const RealSpaceProblem& p, int m) {
  if (m < 1) throw ConfigError("realspace_spectrum needs m >= 1");
  if (p.dim != 1 && p.dim != 2) throw ConfigError("realspace_spectrum supports d in {1,2}");
  if (!(p.spacing > 0.0) || !(p.length > 0.0))
    throw ConfigError("realspace_spectrum needs positive L and h");

  std::vector<double> vals = (p.dim == 1 && p.boundary == Boundary::Dirichlet)
                                 ? dirichlet_1d(p, m)
                                 : dense_fd(p, m);
  std::sort(vals.begin(), vals.end());
  return vals;
}

double hausdorff_window(const std::vector<double>& points,
                        const std::vector<Interval>& intervals, double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("hausdorff_window: empty window");

  std::vector<double> pts;
  for (double p : points)
    if (p >= lo && p <= hi) pts.push_back(p);
  std::sort(pts.begin(), pts.end());

  std::vector<Interval> ivs;
  for (const auto& iv : intervals) {
    const double a = std::max(iv.lo, lo), b = std::min(iv.hi, hi);
    if (a <= b) ivs.push_back({a, b});
  }
  std::sort(ivs.begin(), ivs.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });

  if (pts.empty() || ivs.empty())
    throw ConfigError("hausdorff_window: a side is empty after windowing");

  // ground metric: distance from a point to an interval
  auto dist = [](double x, const Interval& iv) {
    return x < iv.lo ? iv.lo - x : (x > iv.hi ? x - iv.hi : 0.0);
  };

  // one side: every point near some interval
  double d_points = 0.0;
  for (double x : pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& iv : ivs) best = std::min(best, dist(x, iv));
    d_points = std::max(d_points, best);
  }

  // and back: every interval near some point (intervals are the elements of
  // the set, not unions of points)
  double d_intervals = 0.0;
  for (const auto& iv : ivs) {
    double best = std::numeric_limits<double>::infinity();
    for (double x : pts) best = std::min(best, dist(x, iv));
    d_intervals = std::max(d_intervals, best);
  }
  return std::max(d_points, d_intervals);
}

double fd_dispersion_error(double h, double emax) {
  return (M_PI * M_PI / 12.0) * h * h * std::abs(emax);
}

}  // namespace moire

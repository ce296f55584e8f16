#include "core/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace moire {

BlochSolution BlochSolution::from_eigenpair(std::shared_ptr<const PlanewaveBasis> basis,
                                            const KPoint& k, double delta, double lambda,
                                            Eigen::VectorXcd coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != basis->size())
    throw std::invalid_argument("BlochSolution: coefficient length mismatch");
  const double nrm = coeffs.norm();
  if (!(nrm > 0.0)) throw std::invalid_argument("BlochSolution: zero coefficient vector");
  coeffs /= nrm;
  return BlochSolution{std::move(basis), k, delta, lambda, std::move(coeffs)};
}

namespace {

struct RawTerm {
  Eigen::VectorXd omega;
  Cplx u_amp;    // amplitude of the solution
  Cplx res_amp;  // amplitude of (H - lambda) u
};

// Diagonal frequencies and both amplitude sets in basis order.
std::vector<RawTerm> diagonal_terms(const BlochSolution& sol) {
  const PlanewaveBasis& basis = *sol.basis;
  const ProductCell& cell = basis.cell();
  const Eigen::VectorXd kc = sol.k.cart1(cell);
  const Eigen::VectorXd kpc = sol.k.cart2(cell);

  std::vector<RawTerm> terms(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Eigen::VectorXd a = kc + basis.g1(i);
    const Eigen::VectorXd b = kpc + basis.g2(i);
    terms[i].omega = a + b;
    terms[i].u_amp = sol.coeffs[i];
    terms[i].res_amp = -0.5 * sol.delta * (a - b).squaredNorm() * sol.coeffs[i];
  }
  return terms;
}

// Greedy cluster merge on lexicographically sorted frequencies. Nothing
// merges in a genuinely incommensurate configuration.
template <typename Term, typename GetOmega, typename Combine>
std::vector<Term> merge_by_frequency(std::vector<Term> terms, double tol,
                                     GetOmega omega_of, Combine combine,
                                     bool* merged_any = nullptr) {
  std::sort(terms.begin(), terms.end(), [&](const Term& x, const Term& y) {
    const auto& a = omega_of(x);
    const auto& b = omega_of(y);
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (a[i] > b[i]) return false;
    }
    return false;
  });
  std::vector<Term> out;
  for (auto& t : terms) {
    if (!out.empty() &&
        (omega_of(out.back()) - omega_of(t)).norm() <= tol) {
      combine(out.back(), t);
      if (merged_any) *merged_any = true;
    } else {
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace

QuasiPeriodicFunction reconstruct_diagonal(const BlochSolution& sol, double merge_tol) {
  auto raw = diagonal_terms(sol);
  std::vector<QpTerm> terms(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    terms[i] = QpTerm{raw[i].omega, raw[i].u_amp};

  terms = merge_by_frequency(
      std::move(terms), merge_tol, [](const QpTerm& t) -> const Eigen::VectorXd& { return t.omega; },
      [](QpTerm& into, const QpTerm& from) { into.amplitude += from.amplitude; });

  QuasiPeriodicFunction f;
  f.terms = std::move(terms);
  f.provenance = Provenance{sol.k, sol.delta, sol.lambda};
  return f;
}

Cplx evaluate_qp(const QuasiPeriodicFunction& f, const Eigen::VectorXd& r) {
  Cplx acc(0.0, 0.0);
  for (const auto& t : f.terms) {
    const double phase = t.omega.dot(r);
    acc += t.amplitude * Cplx(std::cos(phase), std::sin(phase));
  }
  return acc;
}

ResidualReport exact_residual(const BlochSolution& sol, double merge_tol) {
  auto raw = diagonal_terms(sol);

  bool merged = false;
  raw = merge_by_frequency(
      std::move(raw), merge_tol, [](const RawTerm& t) -> const Eigen::VectorXd& { return t.omega; },
      [](RawTerm& into, const RawTerm& from) {
        into.u_amp += from.u_amp;
        into.res_amp += from.res_amp;
      },
      &merged);

  double res_power = 0.0, u_power = 0.0;
  for (const auto& t : raw) {
    res_power += std::norm(t.res_amp);
    u_power += std::norm(t.u_amp);
  }

  ResidualReport rep;
  rep.lambda = sol.lambda;
  rep.delta = sol.delta;
  rep.exact = !merged;
  rep.relative_ms_residual = std::sqrt(res_power) / std::sqrt(u_power);

  const PlanewaveBasis& basis = *sol.basis;
  const Eigen::VectorXd kc = sol.k.cart1(basis.cell());
  const Eigen::VectorXd kpc = sol.k.cart2(basis.cell());
  double wmax = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (sol.coeffs[i] == Cplx(0.0, 0.0)) continue;
    const Eigen::VectorXd diff = kc + basis.g1(i) - kpc - basis.g2(i);
    wmax = std::max(wmax, diff.squaredNorm());
  }
  rep.bound = 0.5 * sol.delta * wmax;
  return rep;
}

namespace {

// int_{B_R} |sum_j c_j exp(i w_j r)|^2 by midpoint quadrature, returning the
// unnormalized sum of |f|^2 over quadrature cells (cell measures cancel in
// ratios). Chunked accumulation keeps the reduction order fixed no matter
// how many workers run.
double ball_quadrature_power(const std::vector<QpTerm>& terms, int dim, double radius,
                             double h, int workers) {
  const long cells_per_axis = std::lround(2.0 * radius / h);
  auto eval_sq = [&](const Eigen::VectorXd& r) {
    Cplx acc(0.0, 0.0);
    for (const auto& t : terms) {
      const double phase = t.omega.dot(r);
      acc += t.amplitude * Cplx(std::cos(phase), std::sin(phase));
    }
    return std::norm(acc);
  };

  const long total = dim == 1 ? cells_per_axis : cells_per_axis * cells_per_axis;
  const long nchunks = std::min<long>(256, total);
  std::vector<double> partial(nchunks, 0.0);

  parallel_for(nchunks, workers, [&](std::size_t c) {
    const long begin = static_cast<long>(c) * total / nchunks;
    const long end = static_cast<long>(c + 1) * total / nchunks;
    double acc = 0.0;
    Eigen::VectorXd r(dim);
    for (long idx = begin; idx < end; ++idx) {
      if (dim == 1) {
        r[0] = -radius + (idx + 0.5) * h;
      } else {
        const long i = idx / cells_per_axis, j = idx % cells_per_axis;
        r[0] = -radius + (i + 0.5) * h;
        r[1] = -radius + (j + 0.5) * h;
        if (r.squaredNorm() > radius * radius) continue;
      }
      acc += eval_sq(r);
    }
    partial[c] = acc;
  });

  double total_power = 0.0;
  for (double v : partial) total_power += v;
  return total_power;
}

double max_frequency(const std::vector<QpTerm>& terms) {
  double wmax = 0.0;
  for (const auto& t : terms) wmax = std::max(wmax, t.omega.norm());
  return wmax;
}

}  // namespace

double ball_residual(const BlochSolution& sol, double radius, int quad_points_per_unit,
                     int workers) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball_residual requires R > 0");
  if (quad_points_per_unit < 1)
    throw std::invalid_argument("ball_residual requires at least 1 point per unit");

  auto raw = diagonal_terms(sol);
  std::vector<QpTerm> u_terms(raw.size()), res_terms(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    u_terms[i] = QpTerm{raw[i].omega, raw[i].u_amp};
    res_terms[i] = QpTerm{raw[i].omega, raw[i].res_amp};
  }

  // |f|^2 oscillates at up to twice the largest frequency of f
  const double wmax = max_frequency(u_terms);
  const double needed = 2.0 * wmax / M_PI;
  if (quad_points_per_unit <= needed)
    throw ConfigError("ball_residual: quadrature undersamples the integrand; need more than " +
                      std::to_string(needed) + " points per unit");

  const long cells = std::max<long>(1, std::lround(2.0 * radius * quad_points_per_unit));
  const double h = 2.0 * radius / static_cast<double>(cells);

  const double num = ball_quadrature_power(res_terms, sol.basis->dim(), radius, h, workers);
  const double den = ball_quadrature_power(u_terms, sol.basis->dim(), radius, h, workers);
  if (!(den > 0.0)) throw SolverError("ball_residual: vanishing denominator on B_R");
  return std::sqrt(num / den);
}

namespace {

// H^sigma(B_K) surrogate: weighted quadrature of derivatives up to ceil(sigma)
// with linear interpolation in the order. Derivatives of trig sums are exact
// frequency reweightings.
double sobolev_surrogate_sq(const std::vector<QpTerm>& terms, int dim, double k_ball,
                            double sigma) {
  if (terms.empty()) return 0.0;

  const double wmax = max_frequency(terms);
  const int ppu = std::max(32, static_cast<int>(std::ceil(4.0 * wmax / M_PI)));
  const long cells = std::max<long>(1, std::lround(2.0 * k_ball * ppu));
  const double h = 2.0 * k_ball / static_cast<double>(cells);
  const double cell_measure = dim == 1 ? h : h * h;

  auto derivative = [&](const std::vector<QpTerm>& src, int axis) {
    std::vector<QpTerm> out = src;
    for (auto& t : out) t.amplitude *= Cplx(0.0, 1.0) * t.omega[axis];
    return out;
  };
  auto power = [&](const std::vector<QpTerm>& f) {
    return cell_measure * ball_quadrature_power(f, dim, k_ball, h, 1);
  };

  // accumulate H^l squared norms for l = 0, 1, 2
  const int lmax = static_cast<int>(std::ceil(sigma));
  std::vector<double> level(lmax + 1, 0.0);
  level[0] = power(terms);
  std::vector<std::vector<QpTerm>> first;
  if (lmax >= 1) {
    for (int ax = 0; ax < dim; ++ax) first.push_back(derivative(terms, ax));
    level[1] = level[0];
    for (const auto& df : first) level[1] += power(df);
  }
  if (lmax >= 2) {
    level[2] = level[1];
    for (int ax = 0; ax < dim; ++ax)
      for (int ax2 = ax; ax2 < dim; ++ax2) level[2] += power(derivative(first[ax], ax2));
  }

  const int lo = static_cast<int>(std::floor(sigma));
  const double theta = sigma - lo;
  if (theta == 0.0) return level[lo];
  return (1.0 - theta) * level[lo] + theta * level[lo + 1];
}

std::vector<QpTerm> qp_difference(const QuasiPeriodicFunction& x,
                                  const QuasiPeriodicFunction& y, double merge_tol) {
  std::vector<QpTerm> terms = x.terms;
  for (const auto& t : y.terms) terms.push_back(QpTerm{t.omega, -t.amplitude});
  return merge_by_frequency(
      std::move(terms), merge_tol, [](const QpTerm& t) -> const Eigen::VectorXd& { return t.omega; },
      [](QpTerm& into, const QpTerm& from) { into.amplitude += from.amplitude; });
}

}  // namespace

double solution_set_distance(const std::vector<QuasiPeriodicFunction>& set_a,
                             const std::vector<QuasiPeriodicFunction>& set_b,
                             double ball_radius, double s) {
  if (!(s >= 1.0 && s < 2.0))
    throw std::invalid_argument("solution_set_distance requires 1 <= s < 2");
  if (!(ball_radius > 0.0))
    throw std::invalid_argument("solution_set_distance requires a positive ball radius");
  if (set_a.empty()) return 0.0;
  if (set_b.empty()) return std::numeric_limits<double>::infinity();

  const int dim = static_cast<int>(set_a.front().terms.front().omega.size());
  const double sigma = s - 0.5 * dim;

  double sup = 0.0;
  for (const auto& x : set_a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : set_b) {
      const auto diff = qp_difference(x, y, 1e-9);
      best = std::min(best, std::sqrt(sobolev_surrogate_sq(diff, dim, ball_radius, sigma)));
    }
    sup = std::max(sup, best);
  }
  return sup;
}

Eigen::VectorXcd canonical_gauge(const Eigen::VectorXcd& coeffs) {
  long imax = 0;
  double amax = -1.0;
  for (long i = 0; i < coeffs.size(); ++i) {
    const double a = std::abs(coeffs[i]);
    if (a > amax + 1e-15) {
      amax = a;
      imax = i;
    }
  }
  if (amax <= 0.0) return coeffs;
  const Cplx phase = coeffs[imax] / std::abs(coeffs[imax]);
  return coeffs / phase;
}

}  // namespace moire

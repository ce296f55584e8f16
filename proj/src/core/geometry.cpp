#include "core/geometry.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "core/errors.hpp"

namespace moire {

Lattice::Lattice(int dim, Eigen::MatrixXd basis) : dim_(dim), basis_(std::move(basis)) {
  if (dim_ != 1 && dim_ != 2)
    throw ConfigError("lattice dimension must be 1 or 2, got " + std::to_string(dim_));
  if (basis_.rows() != dim_ || basis_.cols() != dim_)
    throw ConfigError("lattice basis must be a " + std::to_string(dim_) + "x" +
                      std::to_string(dim_) + " matrix");
  const double det = basis_.determinant();
  const double scale = basis_.cwiseAbs().maxCoeff();
  if (!(std::abs(det) > 1e-12 * std::max(1.0, scale * scale)))
    throw ConfigError("lattice basis is singular (|det| too small)");
}

ReciprocalLattice::ReciprocalLattice(const Lattice& lat)
    : dim_(lat.dim()),
      basis_(2.0 * M_PI * lat.basis().inverse().transpose()) {}

ReciprocalLattice reciprocal(const Lattice& lat) { return ReciprocalLattice(lat); }

ProductCell::ProductCell(Lattice lat1, Lattice lat2)
    : lat1_(std::move(lat1)),
      lat2_(std::move(lat2)),
      recip1_(lat1_),
      recip2_(lat2_) {
  if (lat1_.dim() != lat2_.dim())
    throw ConfigError("product cell requires lattices of equal dimension");
}

std::string CommensurabilityVerdict::to_string() const {
  if (!commensurate) return "NoWitnessUpTo(" + std::to_string(qmax) + ")";
  auto vec = [](const Eigen::VectorXi& v) {
    std::string s = "[";
    for (int i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "]";
  };
  return "Commensurate(m=" + vec(m) + ", n=" + vec(n) + ")";
}

namespace {

// Enumerates integer vectors with |v|_inf <= qmax (d = 1 or 2), zero included.
void for_each_index(int dim, int qmax, const std::function<void(const Eigen::VectorXi&)>& fn) {
  Eigen::VectorXi v(dim);
  if (dim == 1) {
    for (int a = -qmax; a <= qmax; ++a) {
      v[0] = a;
      fn(v);
    }
  } else {
    for (int a = -qmax; a <= qmax; ++a)
      for (int b = -qmax; b <= qmax; ++b) {
        v[0] = a;
        v[1] = b;
        fn(v);
      }
  }
}

}  // namespace

CommensurabilityVerdict incommensurability_check(const Lattice& lat1,
                                                 const Lattice& lat2, int qmax,
                                                 double tol) {
  if (qmax < 1) throw ConfigError("incommensurability_check requires qmax >= 1");

  const ReciprocalLattice r1(lat1), r2(lat2);
  const Eigen::MatrixXd B1 = r1.basis();
  const Eigen::MatrixXd B2 = r2.basis();
  const Eigen::MatrixXd B2inv = B2.inverse();
  const int d = lat1.dim();

  CommensurabilityVerdict verdict;
  verdict.qmax = qmax;
  verdict.tol = tol;

  // For each m, the only n that can match B1 m lies near round(B2^{-1} B1 m);
  // scanning a +-1 neighborhood covers rounding ambiguity in skewed 2D cells.
  // This is equivalent to the full double loop but O(qmax^d) instead of
  // O(qmax^{2d}).
  long best_cost = std::numeric_limits<long>::max();
  for_each_index(d, qmax, [&](const Eigen::VectorXi& m) {
    if (m.isZero()) return;
    const Eigen::VectorXd g = B1 * m.cast<double>();
    const Eigen::VectorXd y = B2inv * g;
    Eigen::VectorXi n0(d);
    for (int i = 0; i < d; ++i) n0[i] = static_cast<int>(std::lround(y[i]));

    Eigen::VectorXi n(d);
    auto consider = [&](const Eigen::VectorXi& cand) {
      if (cand.isZero()) return;
      if (cand.cwiseAbs().maxCoeff() > qmax) return;
      if ((g - B2 * cand.cast<double>()).norm() > tol) return;
      const long cost = m.cwiseAbs().maxCoeff() + cand.cwiseAbs().maxCoeff();
      if (cost < best_cost) {
        best_cost = cost;
        verdict.commensurate = true;
        verdict.m = m;
        verdict.n = cand;
      }
    };
    if (d == 1) {
      for (int da = -1; da <= 1; ++da) {
        n[0] = n0[0] + da;
        consider(n);
      }
    } else {
      for (int da = -1; da <= 1; ++da)
        for (int db = -1; db <= 1; ++db) {
          n[0] = n0[0] + da;
          n[1] = n0[1] + db;
          consider(n);
        }
    }
  });

  // canonical sign: witnesses come in +- pairs, report the one with a
  // positive leading index
  if (verdict.commensurate) {
    int lead = 0;
    for (int i = 0; i < verdict.m.size(); ++i)
      if (verdict.m[i] != 0) {
        lead = verdict.m[i];
        break;
      }
    if (lead < 0) {
      verdict.m = -verdict.m;
      verdict.n = -verdict.n;
    }
  }
  return verdict;
}

std::vector<KPoint> kgrid(const ProductCell& cell, int n_per_axis) {
  if (n_per_axis < 1) throw ConfigError("kgrid requires n_per_axis >= 1");
  const int d = cell.dim();
  const int n = n_per_axis;

  // fractional midpoints (i + 1/2)/n per axis
  std::vector<double> ticks(n);
  for (int i = 0; i < n; ++i) ticks[i] = (i + 0.5) / n;

  const long per_lattice = static_cast<long>(std::pow(n, d));
  auto frac_at = [&](long flat) {
    Eigen::VectorXd f(d);
    for (int axis = d - 1; axis >= 0; --axis) {
      f[axis] = ticks[flat % n];
      flat /= n;
    }
    return f;
  };

  std::vector<KPoint> grid;
  grid.reserve(per_lattice * per_lattice);
  for (long i = 0; i < per_lattice; ++i)
    for (long j = 0; j < per_lattice; ++j)
      grid.push_back(KPoint{frac_at(i), frac_at(j)});
  return grid;
}

namespace {

Eigen::VectorXd wrap_frac(const Eigen::MatrixXd& recip_basis, const Eigen::VectorXd& cart) {
  Eigen::VectorXd f = recip_basis.inverse() * cart;
  for (int i = 0; i < f.size(); ++i) {
    f[i] -= std::floor(f[i]);
    if (f[i] >= 1.0) f[i] = 0.0;  // guard against floor(1.0 - eps) rounding
  }
  return f;
}

}  // namespace

KPoint wrap_k(const ProductCell& cell, const Eigen::VectorXd& k_cart,
              const Eigen::VectorXd& kp_cart) {
  if (!k_cart.allFinite() || !kp_cart.allFinite())
    throw ConfigError("wrap_k requires finite coordinates");
  return KPoint{wrap_frac(cell.recip1().basis(), k_cart),
                wrap_frac(cell.recip2().basis(), kp_cart)};
}

}  // namespace moire

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace moire {

/// A Bravais lattice {A n : n in Z^d}, d in {1,2}. Columns of `basis` are the
/// lattice vectors.
class Lattice {
 public:
  Lattice(int dim, Eigen::MatrixXd basis);

  int dim() const { return dim_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  double cell_volume() const { return std::abs(basis_.determinant()); }

  /// A * frac for fractional coordinates in [0,1)^d.
  Eigen::VectorXd point(const Eigen::VectorXd& frac) const { return basis_ * frac; }

 private:
  int dim_;
  Eigen::MatrixXd basis_;
};

/// Reciprocal lattice basis B = 2*pi*A^{-T}; columns are reciprocal vectors.
class ReciprocalLattice {
 public:
  explicit ReciprocalLattice(const Lattice& lat);

  int dim() const { return dim_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  Eigen::VectorXd vector(const Eigen::VectorXi& m) const {
    return basis_ * m.cast<double>();
  }

 private:
  int dim_;
  Eigen::MatrixXd basis_;
};

ReciprocalLattice reciprocal(const Lattice& lat);

/// The d+d product structure of the bilayer: lattices R1 x R2 and their
/// reciprocals, carrying the cell Gamma~ = Gamma_1 x Gamma_2.
class ProductCell {
 public:
  ProductCell(Lattice lat1, Lattice lat2);

  int dim() const { return lat1_.dim(); }
  const Lattice& lat1() const { return lat1_; }
  const Lattice& lat2() const { return lat2_; }
  const ReciprocalLattice& recip1() const { return recip1_; }
  const ReciprocalLattice& recip2() const { return recip2_; }

 private:
  Lattice lat1_, lat2_;
  ReciprocalLattice recip1_, recip2_;
};

/// Quasi-momentum k~ = (k, k') as fractional coordinates of Gamma_1* x Gamma_2*,
/// each component in [0,1).
struct KPoint {
  Eigen::VectorXd frac1;
  Eigen::VectorXd frac2;

  Eigen::VectorXd cart1(const ProductCell& cell) const {
    return cell.recip1().basis() * frac1;
  }
  Eigen::VectorXd cart2(const ProductCell& cell) const {
    return cell.recip2().basis() * frac2;
  }
};

/// Outcome of the reciprocal-space commensurability search. The absence of a
/// witness up to qmax is evidence, not proof, of incommensurability.
struct CommensurabilityVerdict {
  bool commensurate = false;
  Eigen::VectorXi m, n;  // witness: 2*pi*A1^{-T} m == 2*pi*A2^{-T} n (within tol)
  int qmax = 0;
  double tol = 0.0;

  std::string to_string() const;
};

/// Exhaustive search for a shared nonzero reciprocal vector with
/// |m|_inf, |n|_inf <= qmax. Returns the smallest witness by |m|_inf + |n|_inf.
CommensurabilityVerdict incommensurability_check(const Lattice& lat1,
                                                 const Lattice& lat2, int qmax,
                                                 double tol = 1e-9);

/// Uniform fractional grid {(i+1/2)/n} per axis over Gamma_1* x Gamma_2*,
/// lexicographic in (frac1, frac2) with the last coordinate fastest.
/// Yields n^(2d) points.
std::vector<KPoint> kgrid(const ProductCell& cell, int n_per_axis);

/// Reduce arbitrary Cartesian (k, k') to the fundamental cell by a reciprocal
/// lattice translation.
KPoint wrap_k(const ProductCell& cell, const Eigen::VectorXd& k_cart,
              const Eigen::VectorXd& kp_cart);

}  // namespace moire

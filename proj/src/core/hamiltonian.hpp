#pragma once

#include <Eigen/Dense>
#include <memory>

#include "core/planewave.hpp"

namespace moire {

/// Fiber operator of the regularized bilayer model at quasi-momentum
/// k~ = (k,k') over a finite planewave basis of the product torus.
///
/// On the planewave (m,n) the symbol is diagonal in the kinetic part,
///     (1/2)|a+b|^2 + (delta/2)|a-b|^2,   a = k+G1(m), b = k'+G2(n),
/// and the potential couples indices axis by axis:
///     V1 shifts m at fixed n, V2 shifts n at fixed m.
/// Couplings leaving the truncation are dropped (Galerkin projection), which
/// keeps the discrete operator Hermitian and variational.
class BlochHamiltonian {
 public:
  /// k and k' are Cartesian; they are not wrapped here so that fibers at
  /// k~ + tau~* can be formed for periodicity checks. delta = 0 is rejected:
  /// the limit is reached only by continuation.
  BlochHamiltonian(std::shared_ptr<const PlanewaveBasis> basis,
                   Eigen::VectorXd k_cart, Eigen::VectorXd kp_cart, double delta,
                   std::shared_ptr<const FourierPotential> v1,
                   std::shared_ptr<const FourierPotential> v2);

  const PlanewaveBasis& basis() const { return *basis_; }
  std::shared_ptr<const PlanewaveBasis> basis_ptr() const { return basis_; }
  double delta() const { return delta_; }
  const Eigen::VectorXd& k_cart() const { return k_; }
  const Eigen::VectorXd& kp_cart() const { return kp_; }
  const FourierPotential& v1() const { return *v1_; }
  const FourierPotential& v2() const { return *v2_; }

  /// Kinetic symbol per basis entry; all entries >= 0.
  const Eigen::VectorXd& kinetic_diag() const { return kinetic_; }

  /// y = H psi, matrix-free. O(|basis| * potential support).
  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const;

  /// Dense assembly, exactly Hermitian by conjugate-symmetric fill.
  /// Intended as an oracle and small-problem fallback.
  Eigen::MatrixXcd assemble_dense(std::size_t dense_cap = 4096) const;

 private:
  std::shared_ptr<const PlanewaveBasis> basis_;
  Eigen::VectorXd k_, kp_;
  double delta_;
  std::shared_ptr<const FourierPotential> v1_, v2_;
  Eigen::VectorXd kinetic_;

  // potential support snapshots for the convolution loops
  std::vector<std::pair<FreqIndex, Cplx>> v1_terms_, v2_terms_;
};

/// Standalone kinetic symbol (1/2)|a+b|^2 + (delta/2)|a-b|^2 over a basis.
Eigen::VectorXd kinetic_diag(const PlanewaveBasis& basis, const Eigen::VectorXd& k_cart,
                             const Eigen::VectorXd& kp_cart, double delta);

/// Index permutation realizing the fiber periodicity H(k~ + tau~*) ~ H(k~)
/// for a reciprocal shift tau~* = (B1 s, B2 t) on a Box basis. interior[i]
/// lists (entry, shifted entry) for entries whose shift stays in the box.
struct ShiftCertificate {
  Eigen::VectorXi s, t;
  std::vector<std::pair<long, long>> interior;  // (index at k~+tau~*, index at k~)
};

ShiftCertificate fiber_shift_equivalence(const PlanewaveBasis& basis,
                                         const Eigen::VectorXi& s,
                                         const Eigen::VectorXi& t);

/// Dense single-layer operator kinetic_coeff*|k+G|^2 + V at quasi-momentum k
/// over the index box |m|_inf <= radius. With kinetic_coeff = 1 this is the
/// tensor factor of the delta = 1 fiber; with 1/2 it is the physical
/// monolayer -1/2 Lap + V.
Eigen::MatrixXcd monolayer_dense(const Lattice& lattice, const FourierPotential& v,
                                 const Eigen::VectorXd& k_cart, int radius,
                                 double kinetic_coeff = 1.0);

}  // namespace moire

#pragma once

#include <array>
#include <complex>
#include <map>
#include <vector>

#include "core/geometry.hpp"

namespace moire {

using Cplx = std::complex<double>;

/// Integer Fourier index of one lattice; the second component is unused for
/// d = 1 and kept at zero so indices are totally ordered for any d.
using FreqIndex = std::array<int, 2>;

FreqIndex make_index(const Eigen::VectorXi& m);
Eigen::VectorXi index_vector(const FreqIndex& idx, int dim);

/// A real periodic potential stored as a finite Fourier series on its own
/// lattice: V(r) = sum_m vhat(m) exp(i G(m).r) with G(m) = 2*pi*A^{-T} m.
/// Hermitian symmetry vhat(-m) = conj(vhat(m)) is enforced exactly at
/// construction, so every derived operator is Hermitian by construction.
class FourierPotential {
 public:
  /// Builds from (index, amplitude) pairs. A missing -m partner is filled in
  /// as the conjugate; a present-but-inconsistent partner is rejected.
  FourierPotential(Lattice lattice, const std::vector<std::pair<FreqIndex, Cplx>>& coeffs);

  static FourierPotential zero(Lattice lattice);

  /// Discrete Fourier analysis of real samples on the uniform fractional grid
  /// r(i) = A i/n (row-major over axes), keeping indices with |m|_inf <= radius.
  /// Requires n >= 2*radius + 1, otherwise the requested band is aliased.
  static FourierPotential from_samples(Lattice lattice, const std::vector<double>& samples,
                                       int n_per_axis, int radius);

  const Lattice& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }
  int radius() const { return radius_; }

  /// Coefficient accessor; absent indices are zero.
  Cplx coeff(const FreqIndex& m) const;
  const std::map<FreqIndex, Cplx>& coeffs() const { return coeffs_; }

  /// Pointwise evaluation; the imaginary residue of the sum is checked
  /// (<= 1e-9, else the coefficients are considered corrupted) and discarded.
  double evaluate(const Eigen::VectorXd& r) const;

  /// sum |vhat(m)|^2; by Parseval this is the mean square of V over its cell.
  double coefficient_power() const;

 private:
  void finalize();

  Lattice lattice_;
  Eigen::MatrixXd recip_basis_;
  std::map<FreqIndex, Cplx> coeffs_;  // ordered: deterministic iteration
  std::vector<std::pair<Eigen::VectorXd, Cplx>> cart_terms_;  // (G, vhat) cache
  int radius_ = 0;
};

/// Combined coefficient view of V~(r,r') = V1(r) + V2(r') on the product
/// lattice: axis-1 indices carry vhat1, axis-2 indices carry vhat2, and the
/// (0,0) index carries the sum of the constants.
class PairPotential {
 public:
  PairPotential(const FourierPotential& v1, const FourierPotential& v2);

  Cplx coeff(const FreqIndex& m, const FreqIndex& n) const;

  /// All combined indices with a nonzero amplitude, lexicographically sorted.
  std::vector<std::pair<std::pair<FreqIndex, FreqIndex>, Cplx>> nonzero() const;

 private:
  const FourierPotential& v1_;
  const FourierPotential& v2_;
};

PairPotential pair_indexing(const FourierPotential& v1, const FourierPotential& v2);

}  // namespace moire

#include "core/hamiltonian.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace moire {

Eigen::VectorXd kinetic_diag(const PlanewaveBasis& basis, const Eigen::VectorXd& k_cart,
                             const Eigen::VectorXd& kp_cart, double delta) {
  if (!(delta > 0.0)) throw ConfigError("fiber operator requires delta > 0");
  const std::size_t n = basis.size();
  Eigen::VectorXd kin(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd a = k_cart + basis.g1(i);
    const Eigen::VectorXd b = kp_cart + basis.g2(i);
    kin[i] = 0.5 * (a + b).squaredNorm() + 0.5 * delta * (a - b).squaredNorm();
  }
  return kin;
}

BlochHamiltonian::BlochHamiltonian(std::shared_ptr<const PlanewaveBasis> basis,
                                   Eigen::VectorXd k_cart, Eigen::VectorXd kp_cart,
                                   double delta,
                                   std::shared_ptr<const FourierPotential> v1,
                                   std::shared_ptr<const FourierPotential> v2)
    : basis_(std::move(basis)),
      k_(std::move(k_cart)),
      kp_(std::move(kp_cart)),
      delta_(delta),
      v1_(std::move(v1)),
      v2_(std::move(v2)) {
  if (!(delta_ > 0.0))
    throw ConfigError("delta must be > 0: the unregularized operator is reached only by continuation");
  const int d = basis_->dim();
  if (k_.size() != d || kp_.size() != d)
    throw ConfigError("quasi-momentum dimension mismatch");

  auto lattices_match = [](const Lattice& a, const Lattice& b) {
    return a.dim() == b.dim() &&
           (a.basis() - b.basis()).cwiseAbs().maxCoeff() <=
               1e-12 * std::max(1.0, a.basis().cwiseAbs().maxCoeff());
  };
  if (!lattices_match(v1_->lattice(), basis_->cell().lat1()) ||
      !lattices_match(v2_->lattice(), basis_->cell().lat2()))
    throw ConfigError("potential lattices do not match the product cell");

  kinetic_ = moire::kinetic_diag(*basis_, k_, kp_, delta_);
  for (const auto& [m, v] : v1_->coeffs()) v1_terms_.emplace_back(m, v);
  for (const auto& [n, v] : v2_->coeffs()) v2_terms_.emplace_back(n, v);
}

Eigen::VectorXcd BlochHamiltonian::apply(const Eigen::VectorXcd& psi) const {
  const std::size_t n = basis_->size();
  if (static_cast<std::size_t>(psi.size()) != n)
    throw std::invalid_argument("apply: vector length does not match basis size");

  Eigen::VectorXcd out = kinetic_.array() * psi.array();

  // out(m,n) += sum_dm vhat1(dm) psi(m-dm, n), and the axis-2 analogue.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = basis_->entry(i);
    Cplx acc(0.0, 0.0);
    for (const auto& [dm, v] : v1_terms_) {
      const FreqIndex src{e.m[0] - dm[0], e.m[1] - dm[1]};
      const long j = basis_->find(src, e.n);
      if (j >= 0) acc += v * psi[j];
    }
    for (const auto& [dn, v] : v2_terms_) {
      const FreqIndex src{e.n[0] - dn[0], e.n[1] - dn[1]};
      const long j = basis_->find(e.m, src);
      if (j >= 0) acc += v * psi[j];
    }
    out[i] += acc;
  }
  return out;
}

Eigen::MatrixXcd BlochHamiltonian::assemble_dense(std::size_t dense_cap) const {
  const std::size_t n = basis_->size();
  if (n > dense_cap)
    throw ConfigError("basis size " + std::to_string(n) + " exceeds dense cap " +
                      std::to_string(dense_cap));

  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(n, n);
  const double v0 = (v1_->coeff({0, 0}) + v2_->coeff({0, 0})).real();
  for (std::size_t i = 0; i < n; ++i) mat(i, i) = kinetic_[i] + v0;

  // Off-diagonal couplings are unique per (row, col): V1 moves m at fixed n,
  // V2 moves n at fixed m, and both at once would need m = m', n = n'.
  // Fill the upper triangle and mirror the conjugate for exact Hermiticity.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = basis_->entry(i);
    for (const auto& [dm, v] : v1_terms_) {
      if (dm == FreqIndex{0, 0}) continue;
      const FreqIndex src{e.m[0] - dm[0], e.m[1] - dm[1]};
      const long j = basis_->find(src, e.n);
      if (j > static_cast<long>(i)) {
        mat(i, j) = v;  // M(i,j) = vhat1(m_i - m_j), here m_i - m_j = dm
        mat(j, i) = std::conj(v);
      }
    }
    for (const auto& [dn, v] : v2_terms_) {
      if (dn == FreqIndex{0, 0}) continue;
      const FreqIndex src{e.n[0] - dn[0], e.n[1] - dn[1]};
      const long j = basis_->find(e.m, src);
      if (j > static_cast<long>(i)) {
        mat(i, j) = v;
        mat(j, i) = std::conj(v);
      }
    }
  }
  return mat;
}

ShiftCertificate fiber_shift_equivalence(const PlanewaveBasis& basis,
                                         const Eigen::VectorXi& s,
                                         const Eigen::VectorXi& t) {
  if (!basis.is_box())
    throw std::invalid_argument("fiber_shift_equivalence requires a Box basis");
  const int d = basis.dim();
  if (s.size() != d || t.size() != d)
    throw std::invalid_argument("shift index dimension mismatch");

  ShiftCertificate cert;
  cert.s = s;
  cert.t = t;
  for (long i = 0; i < static_cast<long>(basis.size()); ++i) {
    const auto& e = basis.entry(i);
    FreqIndex ms = e.m, ns = e.n;
    for (int c = 0; c < d; ++c) {
      ms[c] += s[c];
      ns[c] += t[c];
    }
    const long j = basis.find(ms, ns);
    if (j >= 0) cert.interior.emplace_back(i, j);
  }
  return cert;
}

Eigen::MatrixXcd monolayer_dense(const Lattice& lattice, const FourierPotential& v,
                                 const Eigen::VectorXd& k_cart, int radius,
                                 double kinetic_coeff) {
  const int d = lattice.dim();
  const ReciprocalLattice recip(lattice);

  std::vector<FreqIndex> idx;
  if (d == 1) {
    for (int a = -radius; a <= radius; ++a) idx.push_back({a, 0});
  } else {
    for (int a = -radius; a <= radius; ++a)
      for (int b = -radius; b <= radius; ++b) idx.push_back({a, b});
  }

  const std::size_t n = idx.size();
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd g = recip.vector(index_vector(idx[i], d));
    mat(i, i) = kinetic_coeff * (k_cart + g).squaredNorm() + v.coeff({0, 0}).real();
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const FreqIndex dm{idx[i][0] - idx[j][0], idx[i][1] - idx[j][1]};
      const Cplx c = v.coeff(dm);
      if (c != Cplx(0.0, 0.0)) {
        mat(i, j) = c;  // M(i,j) = vhat(m_i - m_j)
        mat(j, i) = std::conj(c);
      }
    }
  return mat;
}

}  // namespace moire

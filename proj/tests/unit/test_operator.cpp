#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/hamiltonian.hpp"
#include "core/rng.hpp"

using namespace moire;

namespace {

constexpr double kPhi = 1.6180339887498948482;

Lattice lat1d(double a) {
  Eigen::MatrixXd m(1, 1);
  m << a;
  return Lattice(1, m);
}

std::shared_ptr<const FourierPotential> cosine(double a, double amp = 1.0) {
  return std::make_shared<FourierPotential>(
      lat1d(a), std::vector<std::pair<FreqIndex, Cplx>>{{{{1, 0}}, Cplx(amp, 0.0)},
                                                        {{{-1, 0}}, Cplx(amp, 0.0)}});
}

std::shared_ptr<const FourierPotential> zero_pot(double a) {
  return std::make_shared<FourierPotential>(FourierPotential::zero(lat1d(a)));
}

// random Hermitian potential with |m| <= radius
std::shared_ptr<const FourierPotential> random_pot(double a, int radius, std::uint64_t key) {
  CounterRng rng(key);
  std::vector<std::pair<FreqIndex, Cplx>> coeffs;
  coeffs.push_back({{0, 0}, Cplx(rng.uniform(0) - 0.5, 0.0)});
  for (int m = 1; m <= radius; ++m) {
    const Cplx c(rng.uniform(2 * m) - 0.5, rng.uniform(2 * m + 1) - 0.5);
    coeffs.push_back({{m, 0}, c});
    coeffs.push_back({{-m, 0}, std::conj(c)});
  }
  return std::make_shared<FourierPotential>(lat1d(a), coeffs);
}

Eigen::VectorXd x1(double v) {
  Eigen::VectorXd r(1);
  r << v;
  return r;
}

std::shared_ptr<const PlanewaveBasis> box_basis(double a1, double a2, int r1, int r2) {
  return std::make_shared<PlanewaveBasis>(ProductCell(lat1d(a1), lat1d(a2)),
                                          BoxTruncation{r1, r2});
}

Eigen::VectorXcd random_state(std::size_t n, std::uint64_t key) {
  CounterRng rng(key);
  Eigen::VectorXcd v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.standard_normal_pair(i);
  return v / v.norm();
}

}  // namespace

TEST_CASE("kinetic symbol vanishes at the origin mode for k~ = 0") {
  const auto basis = box_basis(1.0, kPhi, 2, 2);
  const auto kin = kinetic_diag(*basis, x1(0.0), x1(0.0), 0.7);
  const long origin = basis->find({0, 0}, {0, 0});
  REQUIRE(origin >= 0);
  CHECK(kin[origin] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kin.minCoeff() >= 0.0);
}

TEST_CASE("kinetic symbol matches the hand-evaluated golden-ratio entry") {
  // a = 0.1 + 2*pi, b = 0.2; value = (1/2)(0.3+2pi)^2 + (0.5/2)(2pi-0.1)^2
  const auto basis = box_basis(1.0, kPhi, 1, 1);
  const auto kin = kinetic_diag(*basis, x1(0.1), x1(0.2), 0.5);
  const long idx = basis->find({1, 0}, {0, 0});
  REQUIRE(idx >= 0);
  const double expected =
      0.5 * std::pow(0.3 + 2.0 * M_PI, 2) + 0.25 * std::pow(2.0 * M_PI - 0.1, 2);
  CHECK(kin[idx] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("delta = 1 kinetic is the parallelogram sum |a|^2 + |b|^2") {
  const auto basis = box_basis(1.0, kPhi, 3, 3);
  const auto kin = kinetic_diag(*basis, x1(0.3), x1(-0.4), 1.0);
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const double a = 0.3 + basis->g1(i)[0];
    const double b = -0.4 + basis->g2(i)[0];
    CHECK(kin[i] == doctest::Approx(a * a + b * b).epsilon(1e-13));
  }
}

TEST_CASE("symbol lower bound: kinetic_delta >= min(1,delta) * kinetic_1 entrywise") {
  const auto basis = box_basis(1.0, kPhi, 4, 4);
  const auto kin1 = kinetic_diag(*basis, x1(0.2), x1(0.5), 1.0);
  for (double delta : {0.01, 0.1, 0.5, 2.0}) {
    const auto kin = kinetic_diag(*basis, x1(0.2), x1(0.5), delta);
    const double c = std::min(1.0, delta);
    for (std::size_t i = 0; i < basis->size(); ++i)
      CHECK(kin[i] >= c * kin1[i] - 1e-12);
  }
}

TEST_CASE("gauge covariance: the symbol is the unfibered form at shifted frequencies") {
  // independent re-derivation of the fiber expansion at random k~
  const auto basis = box_basis(1.0, kPhi, 3, 3);
  CounterRng rng(11);
  for (int trial = 0; trial < 4; ++trial) {
    const double k = rng.uniform(2 * trial) * 2.0 * M_PI;
    const double kp = rng.uniform(2 * trial + 1) * 2.0 * M_PI / kPhi;
    const double delta = 0.05 + rng.uniform(100 + trial);
    const auto kin = kinetic_diag(*basis, x1(k), x1(kp), delta);
    for (std::size_t i = 0; i < basis->size(); ++i) {
      const double xi = k + basis->g1(i)[0];   // frequency of e^{i k~.r~} e^{i G~.r~}
      const double xip = kp + basis->g2(i)[0];
      const double expected =
          0.5 * (xi + xip) * (xi + xip) + 0.5 * delta * (xi - xip) * (xi - xip);
      CHECK(kin[i] == doctest::Approx(expected).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero potentials make apply a pure kinetic scaling") {
  const auto basis = box_basis(1.0, kPhi, 2, 2);
  BlochHamiltonian h(basis, x1(0.1), x1(0.2), 0.3, zero_pot(1.0), zero_pot(kPhi));
  const auto psi = random_state(basis->size(), 5);
  const Eigen::VectorXcd out = h.apply(psi);
  for (std::size_t i = 0; i < basis->size(); ++i)
    CHECK(std::abs(out[i] - h.kinetic_diag()[i] * psi[i]) < 1e-14);
}

TEST_CASE("one convolution step: cosine scatters the origin mode to (+-1, 0)") {
  const auto basis = box_basis(1.0, kPhi, 2, 2);
  BlochHamiltonian h(basis, x1(0.0), x1(0.0), 1.0, cosine(1.0), zero_pot(kPhi));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis->size());
  psi[basis->find({0, 0}, {0, 0})] = 1.0;
  const Eigen::VectorXcd out = h.apply(psi);
  CHECK(std::abs(out[basis->find({0, 0}, {0, 0})]) < 1e-15);  // kinetic = 0 there
  CHECK(std::abs(out[basis->find({1, 0}, {0, 0})] - 1.0) < 1e-15);
  CHECK(std::abs(out[basis->find({-1, 0}, {0, 0})] - 1.0) < 1e-15);
  CHECK(std::abs(out[basis->find({0, 0}, {1, 0})]) < 1e-15);  // V2 = 0
}

TEST_CASE("matrix-free apply agrees with the dense oracle on random states") {
  const auto basis = box_basis(1.0, kPhi, 3, 4);
  BlochHamiltonian h(basis, x1(0.15), x1(0.35), 0.2, random_pot(1.0, 2, 21),
                     random_pot(kPhi, 3, 22));
  const Eigen::MatrixXcd mat = h.assemble_dense();
  for (int trial = 0; trial < 5; ++trial) {
    const auto psi = random_state(basis->size(), 100 + trial);
    CHECK((h.apply(psi) - mat * psi).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("1x1 basis dense matrix is the constant vhat1(0)+vhat2(0)") {
  const auto basis = box_basis(1.0, kPhi, 0, 0);
  const FourierPotential c1(lat1d(1.0), {{{{0, 0}}, Cplx(0.7, 0.0)}});
  const FourierPotential c2(lat1d(kPhi), {{{{0, 0}}, Cplx(-0.2, 0.0)}});
  BlochHamiltonian h(basis, x1(0.0), x1(0.0), 1.0,
                     std::make_shared<FourierPotential>(c1),
                     std::make_shared<FourierPotential>(c2));
  const Eigen::MatrixXcd mat = h.assemble_dense();
  REQUIRE(mat.rows() == 1);
  CHECK(std::abs(mat(0, 0) - Cplx(0.5, 0.0)) < 1e-15);
}

TEST_CASE("dense assembly is exactly Hermitian for random configs") {
  CounterRng rng(33);
  for (int trial = 0; trial < 8; ++trial) {
    const int r1 = 1 + static_cast<int>(rng.uniform(4 * trial) * 3);
    const int r2 = 1 + static_cast<int>(rng.uniform(4 * trial + 1) * 3);
    const double k = rng.uniform(4 * trial + 2);
    const double kp = rng.uniform(4 * trial + 3);
    const auto basis = box_basis(1.0, kPhi, r1, r2);
    BlochHamiltonian h(basis, x1(k), x1(kp), 0.01 + 0.5 * trial / 8.0,
                       random_pot(1.0, r1, 400 + trial), random_pot(kPhi, r2, 500 + trial));
    const Eigen::MatrixXcd mat = h.assemble_dense();
    CHECK((mat - mat.adjoint()).cwiseAbs().maxCoeff() == 0.0);  // conjugate fill
  }
}

TEST_CASE("dense cap rejects oversized bases") {
  const auto basis = box_basis(1.0, kPhi, 4, 4);
  BlochHamiltonian h(basis, x1(0.0), x1(0.0), 1.0, zero_pot(1.0), zero_pot(kPhi));
  CHECK_THROWS_AS(h.assemble_dense(10), ConfigError);
}

TEST_CASE("delta = 0 is rejected at construction") {
  const auto basis = box_basis(1.0, kPhi, 1, 1);
  CHECK_THROWS_AS(
      BlochHamiltonian(basis, x1(0.0), x1(0.0), 0.0, zero_pot(1.0), zero_pot(kPhi)),
      ConfigError);
}

TEST_CASE("mismatched potential lattice is rejected") {
  const auto basis = box_basis(1.0, kPhi, 1, 1);
  CHECK_THROWS_AS(
      BlochHamiltonian(basis, x1(0.0), x1(0.0), 0.5, cosine(2.0), zero_pot(kPhi)),
      ConfigError);
}

TEST_CASE("form monotonicity in delta") {
  const auto basis = box_basis(1.0, kPhi, 3, 3);
  const auto v1 = random_pot(1.0, 2, 61);
  const auto v2 = random_pot(kPhi, 2, 62);
  BlochHamiltonian h_small(basis, x1(0.2), x1(0.1), 0.05, v1, v2);
  BlochHamiltonian h_large(basis, x1(0.2), x1(0.1), 0.4, v1, v2);
  for (int trial = 0; trial < 6; ++trial) {
    const auto psi = random_state(basis->size(), 900 + trial);
    const double q_small = std::real(psi.dot(h_small.apply(psi)));
    const double q_large = std::real(psi.dot(h_large.apply(psi)));
    CHECK(q_large >= q_small - 1e-12);
  }
}

TEST_CASE("Hermiticity through matrix-free apply") {
  const auto basis = box_basis(1.0, kPhi, 4, 3);
  BlochHamiltonian h(basis, x1(0.4), x1(0.9), 0.13, random_pot(1.0, 3, 71),
                     random_pot(kPhi, 2, 72));
  for (int trial = 0; trial < 6; ++trial) {
    const auto x = random_state(basis->size(), 1000 + trial);
    const auto y = random_state(basis->size(), 2000 + trial);
    const Cplx lhs = y.dot(h.apply(x));
    const Cplx rhs = h.apply(y).dot(x);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("delta = 1 dense operator is the Kronecker sum of monolayers") {
  const auto v1 = cosine(1.0);
  const auto v2 = cosine(kPhi);
  const int r1 = 3, r2 = 4;
  const auto basis = box_basis(1.0, kPhi, r1, r2);
  const double k = 0.25, kp = 0.6;
  BlochHamiltonian h(basis, x1(k), x1(kp), 1.0, v1, v2);
  const Eigen::MatrixXcd mat = h.assemble_dense();

  const Eigen::MatrixXcd m1 = monolayer_dense(lat1d(1.0), *v1, x1(k), r1, 1.0);
  const Eigen::MatrixXcd m2 = monolayer_dense(lat1d(kPhi), *v2, x1(kp), r2, 1.0);
  const long n2 = 2 * r2 + 1;

  double worst = 0.0;
  for (long i = 0; i < mat.rows(); ++i)
    for (long j = 0; j < mat.cols(); ++j) {
      const long mi = i / n2, ni = i % n2, mj = j / n2, nj = j % n2;
      Cplx expected(0.0, 0.0);
      if (ni == nj) expected += m1(mi, mj);
      if (mi == mj) expected += m2(ni, nj);
      worst = std::max(worst, std::abs(mat(i, j) - expected));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("fiber shift certificate: zero shift is the identity") {
  const auto basis = box_basis(1.0, kPhi, 2, 2);
  Eigen::VectorXi zero(1);
  zero << 0;
  const auto cert = fiber_shift_equivalence(*basis, zero, zero);
  CHECK(cert.interior.size() == basis->size());
  for (const auto& [from, to] : cert.interior) CHECK(from == to);
}

TEST_CASE("fiber shift certificate: unit shift maps m -> m+1 on the interior") {
  const auto basis = box_basis(1.0, kPhi, 3, 3);
  Eigen::VectorXi s(1), t(1);
  s << 1;
  t << 0;
  const auto cert = fiber_shift_equivalence(*basis, s, t);
  // interior: m in [-3, 2], all n
  CHECK(cert.interior.size() == 6u * 7u);
  for (const auto& [from, to] : cert.interior) {
    const auto& e = basis->entry(from);
    const auto& se = basis->entry(to);
    CHECK(se.m[0] == e.m[0] + 1);
    CHECK(se.n[0] == e.n[0]);
  }

  // the kinetic symbol at k~ + tau~* equals the permuted symbol at k~
  const double tau = 2.0 * M_PI;
  const auto kin_base = kinetic_diag(*basis, x1(0.2), x1(0.3), 0.4);
  const auto kin_shifted = kinetic_diag(*basis, x1(0.2 + tau), x1(0.3), 0.4);
  for (const auto& [from, to] : cert.interior)
    CHECK(kin_shifted[from] == doctest::Approx(kin_base[to]).epsilon(1e-12));
}

TEST_CASE("energy cut basis: closed under negation and inside its bounding box") {
  const ProductCell cell(lat1d(1.0), lat1d(kPhi));
  KPoint k{x1(0.3), x1(0.7)};
  const PlanewaveBasis basis(cell, EnergyCutTruncation{150.0, k, 0.5});
  REQUIRE(basis.size() > 0);
  CHECK_FALSE(basis.is_box());
  for (const auto& e : basis.entries()) {
    CHECK(basis.find({-e.m[0], -e.m[1]}, {-e.n[0], -e.n[1]}) >= 0);
  }
  // smaller cut -> subset
  const PlanewaveBasis smaller(cell, EnergyCutTruncation{60.0, k, 0.5});
  CHECK(smaller.size() < basis.size());
  for (const auto& e : smaller.entries()) CHECK(basis.find(e.m, e.n) >= 0);
}

TEST_CASE("energy cut apply agrees with its dense assembly") {
  const ProductCell cell(lat1d(1.0), lat1d(kPhi));
  KPoint k{x1(0.2), x1(0.4)};
  const auto basis =
      std::make_shared<PlanewaveBasis>(cell, EnergyCutTruncation{80.0, k, 0.3});
  BlochHamiltonian h(basis, k.cart1(cell), k.cart2(cell), 0.3, random_pot(1.0, 2, 81),
                     random_pot(kPhi, 2, 82));
  const Eigen::MatrixXcd mat = h.assemble_dense();
  CHECK((mat - mat.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  const auto psi = random_state(basis->size(), 3000);
  CHECK((h.apply(psi) - mat * psi).cwiseAbs().maxCoeff() < 1e-12);
}

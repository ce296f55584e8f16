#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/potential.hpp"
#include "core/rng.hpp"

using namespace moire;

namespace {

Lattice lat1d(double a) {
  Eigen::MatrixXd m(1, 1);
  m << a;
  return Lattice(1, m);
}

FourierPotential cosine(double a = 1.0) {
  // 2 cos(2 pi x / a): vhat(+-1) = 1
  return FourierPotential(lat1d(a), {{{{1, 0}}, Cplx(1.0, 0.0)},
                                     {{{-1, 0}}, Cplx(1.0, 0.0)}});
}

Eigen::VectorXd x1(double v) {
  Eigen::VectorXd r(1);
  r << v;
  return r;
}

}  // namespace

TEST_CASE("cosine potential point values") {
  const auto v = cosine();
  CHECK(v.evaluate(x1(0.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(v.evaluate(x1(0.25)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v.radius() == 1);
}

TEST_CASE("constant potential evaluates to its constant") {
  const FourierPotential v(lat1d(1.0), {{{{0, 0}}, Cplx(3.5, 0.0)}});
  CHECK(v.evaluate(x1(0.1)) == doctest::Approx(3.5));
  CHECK(v.evaluate(x1(17.3)) == doctest::Approx(3.5));
}

TEST_CASE("missing conjugate partner is auto-completed") {
  const FourierPotential v(lat1d(1.0), {{{{2, 0}}, Cplx(0.5, 0.25)}});
  CHECK(v.coeff({-2, 0}) == std::conj(v.coeff({2, 0})));
  // value at 0 is 2*Re(vhat(2)) = 1.0
  CHECK(v.evaluate(x1(0.0)) == doctest::Approx(1.0));
}

TEST_CASE("inconsistent Hermitian pair is rejected") {
  CHECK_THROWS_AS(FourierPotential(lat1d(1.0), {{{{1, 0}}, Cplx(1.0, 0.0)},
                                                {{{-1, 0}}, Cplx(0.5, 0.0)}}),
                  ConfigError);
}

TEST_CASE("complex vhat(0) is rejected") {
  CHECK_THROWS_AS(FourierPotential(lat1d(1.0), {{{{0, 0}}, Cplx(1.0, 0.5)}}), ConfigError);
}

TEST_CASE("evaluation is lattice-periodic") {
  const auto v = FourierPotential(lat1d(1.7), {{{{1, 0}}, Cplx(0.3, 0.7)},
                                               {{{-1, 0}}, Cplx(0.3, -0.7)},
                                               {{{2, 0}}, Cplx(-0.2, 0.1)},
                                               {{{-2, 0}}, Cplx(-0.2, -0.1)}});
  for (double x : {0.0, 0.31, 0.77, 1.21}) {
    const double base = v.evaluate(x1(x));
    for (int shift : {1, -2, 5})
      CHECK(std::abs(v.evaluate(x1(x + 1.7 * shift)) - base) < 1e-10);
  }
}

TEST_CASE("from_samples of a constant") {
  const std::vector<double> samples(8, 3.0);
  const auto v = FourierPotential::from_samples(lat1d(1.0), samples, 8, 1);
  CHECK(v.coeff({0, 0}).real() == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(v.coeff({1, 0})) < 1e-14);
}

TEST_CASE("from_samples recovers cosine coefficients on an 8-point grid") {
  std::vector<double> samples(8);
  for (int i = 0; i < 8; ++i) samples[i] = 2.0 * std::cos(2.0 * M_PI * i / 8.0);
  const auto v = FourierPotential::from_samples(lat1d(1.0), samples, 8, 1);
  CHECK(std::abs(v.coeff({1, 0}) - Cplx(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(v.coeff({-1, 0}) - Cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("from_samples rejects an aliased request") {
  CHECK_THROWS_AS(FourierPotential::from_samples(lat1d(1.0), {1, 2, 3}, 3, 2), ConfigError);
}

TEST_CASE("from_samples roundtrip reproduces coefficients when unaliased") {
  // build a random real potential, sample it, re-analyze
  CounterRng rng(42);
  std::vector<std::pair<FreqIndex, Cplx>> coeffs;
  coeffs.push_back({{0, 0}, Cplx(rng.uniform(0) - 0.5, 0.0)});
  for (int m = 1; m <= 3; ++m) {
    const Cplx c(rng.uniform(2 * m) - 0.5, rng.uniform(2 * m + 1) - 0.5);
    coeffs.push_back({{m, 0}, c});
    coeffs.push_back({{-m, 0}, std::conj(c)});
  }
  const FourierPotential v(lat1d(1.0), coeffs);

  const int n = 16;
  std::vector<double> samples(n);
  for (int i = 0; i < n; ++i) samples[i] = v.evaluate(x1(double(i) / n));
  const auto w = FourierPotential::from_samples(lat1d(1.0), samples, n, 3);

  for (const auto& [idx, c] : v.coeffs()) CHECK(std::abs(w.coeff(idx) - c) < 1e-10);
}

TEST_CASE("from_samples output is Hermitian for random real samples") {
  CounterRng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> samples(12);
    for (int i = 0; i < 12; ++i)
      samples[i] = rng.uniform(trial * 100 + i) * 4.0 - 2.0;
    const auto v = FourierPotential::from_samples(lat1d(1.0), samples, 12, 4);
    for (const auto& [idx, c] : v.coeffs()) {
      const FreqIndex neg{-idx[0], -idx[1]};
      CHECK(v.coeff(neg) == std::conj(c));  // exact by construction
    }
  }
}

TEST_CASE("Parseval: mean square over the cell equals coefficient power") {
  const auto v = FourierPotential(lat1d(1.3), {{{{0, 0}}, Cplx(0.4, 0.0)},
                                               {{{1, 0}}, Cplx(0.7, -0.2)},
                                               {{{-1, 0}}, Cplx(0.7, 0.2)},
                                               {{{3, 0}}, Cplx(-0.1, 0.05)},
                                               {{{-3, 0}}, Cplx(-0.1, -0.05)}});
  // quadrature oracle: midpoint rule over one cell
  const int n = 4096;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double val = v.evaluate(x1(1.3 * (i + 0.5) / n));
    acc += val * val;
  }
  const double mean_square = acc / n;
  CHECK(mean_square == doctest::Approx(v.coefficient_power()).epsilon(1e-8));
}

TEST_CASE("2d potential evaluation and sampling") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.0, 1.0;
  const Lattice lat(2, a);
  const FourierPotential v(lat, {{{{1, 0}}, Cplx(0.5, 0.0)},
                                 {{{-1, 0}}, Cplx(0.5, 0.0)},
                                 {{{0, 1}}, Cplx(0.25, 0.0)},
                                 {{{0, -1}}, Cplx(0.25, 0.0)}});
  Eigen::VectorXd r(2);
  r << 0.0, 0.0;
  CHECK(v.evaluate(r) == doctest::Approx(1.5));

  const int n = 9;
  std::vector<double> samples(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r << double(i) / n, double(j) / n;
      samples[i * n + j] = v.evaluate(r);
    }
  const auto w = FourierPotential::from_samples(lat, samples, n, 1);
  for (const auto& [idx, c] : v.coeffs()) CHECK(std::abs(w.coeff(idx) - c) < 1e-12);
}

TEST_CASE("pair indexing: zero potentials give the zero accessor") {
  const auto z1 = FourierPotential::zero(lat1d(1.0));
  const auto z2 = FourierPotential::zero(lat1d(2.0));
  const auto pair = pair_indexing(z1, z2);
  CHECK(pair.coeff({0, 0}, {0, 0}) == Cplx(0.0, 0.0));
  CHECK(pair.nonzero().empty());
}

TEST_CASE("pair indexing: constants add at the shared origin") {
  const FourierPotential v1(lat1d(1.0), {{{{0, 0}}, Cplx(1.25, 0.0)}});
  const FourierPotential v2(lat1d(2.0), {{{{0, 0}}, Cplx(0.5, 0.0)}});
  const auto pair = pair_indexing(v1, v2);
  CHECK(pair.coeff({0, 0}, {0, 0}) == Cplx(1.75, 0.0));
}

TEST_CASE("pair indexing: cosine pair has exactly 5 nonzero combined indices") {
  const auto v1 = cosine(1.0);
  const FourierPotential v2(lat1d(2.0), {{{{1, 0}}, Cplx(0.5, 0.0)},
                                         {{{-1, 0}}, Cplx(0.5, 0.0)},
                                         {{{0, 0}}, Cplx(0.1, 0.0)}});
  // {(+-1,0)} from v1, {(0,+-1)} from v2, (0,0) from v2's constant
  const auto pair = pair_indexing(v1, v2);
  CHECK(pair.nonzero().size() == 5);
  CHECK(pair.coeff({1, 0}, {0, 0}) == Cplx(1.0, 0.0));
  CHECK(pair.coeff({0, 0}, {-1, 0}) == Cplx(0.5, 0.0));
  CHECK(pair.coeff({1, 0}, {1, 0}) == Cplx(0.0, 0.0));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/bloch.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

using namespace moire;

namespace {

constexpr double kPhi = 1.6180339887498948482;

Lattice lat1d(double a) {
  Eigen::MatrixXd m(1, 1);
  m << a;
  return Lattice(1, m);
}

std::shared_ptr<const FourierPotential> cosine(double a) {
  return std::make_shared<FourierPotential>(
      lat1d(a), std::vector<std::pair<FreqIndex, Cplx>>{{{{1, 0}}, Cplx(1.0, 0.0)},
                                                        {{{-1, 0}}, Cplx(1.0, 0.0)}});
}

std::shared_ptr<const PlanewaveBasis> box_basis(double a2, int r) {
  return std::make_shared<PlanewaveBasis>(ProductCell(lat1d(1.0), lat1d(a2)),
                                          BoxTruncation{r, r});
}

Eigen::VectorXd frac1(double v) {
  Eigen::VectorXd f(1);
  f << v;
  return f;
}

BlochSolution single_mode(const std::shared_ptr<const PlanewaveBasis>& basis,
                          const KPoint& k, double delta, FreqIndex m, FreqIndex n) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis->size());
  c[basis->find(m, n)] = 1.0;
  return BlochSolution::from_eigenpair(basis, k, delta, 0.0, c);
}

// dense-solved band-1 solution of the golden-ratio benchmark fiber
BlochSolution benchmark_band1(int radius, double delta, double kf = 0.3, double kpf = 0.45) {
  auto basis = box_basis(kPhi, radius);
  const KPoint k{frac1(kf), frac1(kpf)};
  const auto& cell = basis->cell();
  BlochHamiltonian h(basis, k.cart1(cell), k.cart2(cell), delta, cosine(1.0), cosine(kPhi));
  SolverOptions opt;
  opt.m = 1;
  opt.path = SolvePath::Dense;
  const EigenResult res = lowest_eigenpairs(h, opt);
  return BlochSolution::from_eigenpair(basis, k, delta, res.eigenvalues[0],
                                       res.eigenvectors.col(0));
}

}  // namespace

TEST_CASE("diagonal restriction of a single origin mode is one term at k+k'") {
  auto basis = box_basis(kPhi, 1);
  const KPoint k{frac1(0.25), frac1(0.5)};
  const auto sol = single_mode(basis, k, 0.1, {0, 0}, {0, 0});
  const auto qp = reconstruct_diagonal(sol);
  REQUIRE(qp.terms.size() == basis->size());  // all terms present, others zero
  const double expected_omega =
      k.cart1(basis->cell())[0] + k.cart2(basis->cell())[0];
  double total = 0.0;
  for (const auto& t : qp.terms) {
    total += std::norm(t.amplitude);
    if (std::abs(t.amplitude) > 0.5)
      CHECK(t.omega[0] == doctest::Approx(expected_omega).epsilon(1e-14));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("incommensurate frequencies never collide: term count equals basis size") {
  auto basis = box_basis(kPhi, 3);
  const KPoint k{frac1(0.1), frac1(0.7)};
  CounterRng rng(5);
  Eigen::VectorXcd c(basis->size());
  for (std::size_t i = 0; i < basis->size(); ++i) c[i] = rng.standard_normal_pair(i);
  const auto sol = BlochSolution::from_eigenpair(basis, k, 0.05, 0.0, c);
  const auto qp = reconstruct_diagonal(sol);
  CHECK(qp.terms.size() == basis->size());
  // min pairwise separation after merging exceeds the merge tolerance
  for (std::size_t i = 0; i + 1 < qp.terms.size(); ++i)
    CHECK(std::abs(qp.terms[i + 1].omega[0] - qp.terms[i].omega[0]) > 1e-9);
}

TEST_CASE("engineered commensurate collision merges amplitudes") {
  // identical lattices: G1(1)+G2(0) collides with G1(0)+G2(1)
  auto basis = box_basis(1.0, 1);
  const KPoint k{frac1(0.2), frac1(0.2)};
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis->size());
  c[basis->find({1, 0}, {0, 0})] = Cplx(0.6, 0.0);
  c[basis->find({0, 0}, {1, 0})] = Cplx(0.0, 0.8);
  const auto sol = BlochSolution::from_eigenpair(basis, k, 0.1, 0.0, c);
  const auto qp = reconstruct_diagonal(sol);
  CHECK(qp.terms.size() < basis->size());
  // the merged term carries the sum of both amplitudes
  bool found = false;
  for (const auto& t : qp.terms)
    if (std::abs(t.amplitude - Cplx(0.6, 0.8)) < 1e-12) found = true;
  CHECK(found);
}

TEST_CASE("evaluate_qp basics") {
  QuasiPeriodicFunction f;
  f.terms.push_back({frac1(1.7), Cplx(1.0, 0.0)});
  CHECK(std::abs(evaluate_qp(f, frac1(0.0)) - Cplx(1.0, 0.0)) < 1e-15);

  QuasiPeriodicFunction g;
  g.terms.push_back({frac1(2.0), Cplx(0.5, 0.0)});
  g.terms.push_back({frac1(-2.0), Cplx(0.5, 0.0)});
  for (double r : {0.0, 0.3, 1.1})
    CHECK(std::abs(evaluate_qp(g, frac1(r)) - std::cos(2.0 * r)) < 1e-14);

  double bound = 0.0;
  for (const auto& t : g.terms) bound += std::abs(t.amplitude);
  CounterRng rng(3);
  for (int i = 0; i < 10; ++i)
    CHECK(std::abs(evaluate_qp(g, frac1(rng.uniform(i) * 100))) <= bound + 1e-14);
}

TEST_CASE("diagonal-symmetric mode has exactly zero residual") {
  // bitwise k == k' is reachable on identical lattices: same basis, same frac
  auto same = box_basis(1.0, 1);
  const KPoint keq{frac1(0.3), frac1(0.3)};
  REQUIRE(keq.cart1(same->cell())[0] == keq.cart2(same->cell())[0]);
  const auto sol_eq = single_mode(same, keq, 0.25, {0, 0}, {0, 0});
  CHECK(exact_residual(sol_eq).relative_ms_residual == 0.0);

  // on the golden pair k == k' only up to rounding; the residual follows suit
  auto basis = box_basis(kPhi, 1);
  const double f1 = 0.3;
  const KPoint k{frac1(f1), frac1(f1 * kPhi)};
  REQUIRE(std::abs(k.cart1(basis->cell())[0] - k.cart2(basis->cell())[0]) < 1e-14);
  const auto sol = single_mode(basis, k, 0.25, {0, 0}, {0, 0});
  const auto rep = exact_residual(sol);
  CHECK(rep.relative_ms_residual < 1e-25);
  CHECK(rep.exact);
}

TEST_CASE("single-mode residual equals (delta/2) w^2") {
  auto basis = box_basis(kPhi, 2);
  const KPoint k{frac1(0.15), frac1(0.6)};
  const FreqIndex m{1, 0}, n{-1, 0};
  const double delta = 0.08;
  const auto sol = single_mode(basis, k, delta, m, n);
  const double a = k.cart1(basis->cell())[0] + 2.0 * M_PI;
  const double b = k.cart2(basis->cell())[0] - 2.0 * M_PI / kPhi;
  const double expected = 0.5 * delta * (a - b) * (a - b);
  const auto rep = exact_residual(sol);
  CHECK(rep.relative_ms_residual == doctest::Approx(expected).epsilon(1e-13));
  CHECK(rep.bound == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("residual is exactly homogeneous of degree 1 in delta for a frozen vector") {
  const BlochSolution base = benchmark_band1(4, 0.05);
  for (double delta : {0.1, 0.025}) {
    BlochSolution moved = base;
    moved.delta = delta;
    const double r_base = exact_residual(base).relative_ms_residual;
    const double r_moved = exact_residual(moved).relative_ms_residual;
    CHECK(r_moved / r_base == doctest::Approx(delta / 0.05).epsilon(1e-13));
  }
}

TEST_CASE("residual respects the Parseval bound for converged eigenpairs") {
  for (double delta : {0.2, 0.05}) {
    const BlochSolution sol = benchmark_band1(4, delta);
    const auto rep = exact_residual(sol);
    CHECK(rep.relative_ms_residual <= rep.bound + 1e-15);
    CHECK(rep.relative_ms_residual > 0.0);
  }
}

TEST_CASE("ball residual of the residual-free mode is zero") {
  auto same = box_basis(1.0, 1);
  const KPoint keq{frac1(0.3), frac1(0.3)};
  const auto sol = single_mode(same, keq, 0.25, {0, 0}, {0, 0});
  CHECK(ball_residual(sol, 10.0, 16) == 0.0);
}

TEST_CASE("single-mode ball residual is R-independent and equals the exact value") {
  auto basis = box_basis(kPhi, 1);
  const KPoint k{frac1(0.15), frac1(0.6)};
  const auto sol = single_mode(basis, k, 0.08, {1, 0}, {-1, 0});
  const double exact = exact_residual(sol).relative_ms_residual;
  for (double radius : {5.0, 20.0}) {
    const double ball = ball_residual(sol, radius, 32);
    CHECK(ball == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("ball residual rejects sub-Nyquist quadrature") {
  const BlochSolution sol = benchmark_band1(4, 0.05);
  CHECK_THROWS_AS(ball_residual(sol, 10.0, 2), ConfigError);
}

TEST_CASE("ball residual approaches the exact Parseval value as R grows") {
  const BlochSolution sol = benchmark_band1(4, 0.1);
  const double exact = exact_residual(sol).relative_ms_residual;
  const double near = ball_residual(sol, 25.0, 48);
  const double far = ball_residual(sol, 200.0, 48);
  CHECK(std::abs(far - exact) < std::abs(near - exact));
  CHECK(std::abs(far - exact) / exact < 0.05);
}

TEST_CASE("reconstruct_diagonal preserves total power for unit solutions") {
  const BlochSolution sol = benchmark_band1(3, 0.07);
  const auto qp = reconstruct_diagonal(sol);
  double power = 0.0;
  for (const auto& t : qp.terms) power += std::norm(t.amplitude);
  CHECK(power == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("solution set distance: identical singletons give zero") {
  const BlochSolution sol = benchmark_band1(3, 0.1);
  const auto qp = reconstruct_diagonal(sol);
  CHECK(solution_set_distance({qp}, {qp}, 5.0, 1.5) == doctest::Approx(0.0));
}

TEST_CASE("solution set distance: inf over a superset can only shrink") {
  const BlochSolution a = benchmark_band1(3, 0.1);
  const BlochSolution b = benchmark_band1(3, 0.05);
  const BlochSolution c = benchmark_band1(3, 0.025);
  const auto qa = reconstruct_diagonal(a);
  const auto qb = reconstruct_diagonal(b);
  const auto qc = reconstruct_diagonal(c);
  const double d_small = solution_set_distance({qa}, {qb, qc}, 5.0, 1.5);
  const double d_large = solution_set_distance({qa}, {qb}, 5.0, 1.5);
  CHECK(d_small <= d_large + 1e-14);
}

TEST_CASE("solution set distance: empty target is infinite, empty source is zero") {
  const auto qp = reconstruct_diagonal(benchmark_band1(2, 0.1));
  CHECK(std::isinf(solution_set_distance({qp}, {}, 5.0, 1.5)));
  CHECK(solution_set_distance({}, {qp}, 5.0, 1.5) == 0.0);
}

TEST_CASE("solution set distance validates s") {
  const auto qp = reconstruct_diagonal(benchmark_band1(2, 0.1));
  CHECK_THROWS_AS(solution_set_distance({qp}, {qp}, 5.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(solution_set_distance({qp}, {qp}, 5.0, 2.0), std::invalid_argument);
}

TEST_CASE("delta ladder solution sets behave like a Cauchy sequence") {
  // gauge-fixed band-1 solutions at three deltas; the two closest deltas are
  // nearer in the surrogate Sobolev distance
  auto gauge = [](BlochSolution sol) {
    sol.coeffs = canonical_gauge(sol.coeffs);
    return reconstruct_diagonal(sol);
  };
  const auto q_far = gauge(benchmark_band1(4, 0.1));
  const auto q_mid = gauge(benchmark_band1(4, 0.05));
  const auto q_near = gauge(benchmark_band1(4, 0.025));
  const double d_far = solution_set_distance({q_far}, {q_near}, 10.0, 1.5);
  const double d_mid = solution_set_distance({q_mid}, {q_near}, 10.0, 1.5);
  CHECK(d_mid < d_far);
}

TEST_CASE("canonical gauge makes the dominant coefficient real nonnegative") {
  CounterRng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXcd v(6);
    for (int i = 0; i < 6; ++i) v[i] = rng.standard_normal_pair(10 * trial + i);
    const Eigen::VectorXcd g = canonical_gauge(v);
    long imax = 0;
    double amax = -1.0;
    for (long i = 0; i < 6; ++i)
      if (std::abs(g[i]) > amax + 1e-15) {
        amax = std::abs(g[i]);
        imax = i;
      }
    CHECK(g[imax].imag() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(g[imax].real() >= 0.0);
    // gauge change preserves moduli
    for (long i = 0; i < 6; ++i) CHECK(std::abs(g[i]) == doctest::Approx(std::abs(v[i])));
  }
}

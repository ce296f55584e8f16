#include "core/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace moire {

namespace {

using CplxLd = std::complex<long double>;

// Rayleigh quotient with long double accumulation. For a unit-ish vector the
// refined value carries ~|M| * eps_ld * n error, well below the double
// eigensolver noise, so nested-basis monotonicity survives at 1e-12 slack.
double refined_rayleigh(const Eigen::MatrixXcd& mat, const Eigen::VectorXcd& x) {
  const long n = mat.rows();
  CplxLd num(0.0L, 0.0L);
  long double den = 0.0L;
  for (long i = 0; i < n; ++i) {
    CplxLd yi(0.0L, 0.0L);
    for (long j = 0; j < n; ++j) {
      const auto mij = mat(i, j);
      const auto xj = x(j);
      yi += CplxLd(mij.real(), mij.imag()) * CplxLd(xj.real(), xj.imag());
    }
    const CplxLd xi(x(i).real(), x(i).imag());
    num += std::conj(xi) * yi;
    den += std::norm(xi);
  }
  return static_cast<double>(num.real() / den);
}

Eigen::MatrixXcd apply_block(const BlochHamiltonian& h, const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd y(x.rows(), x.cols());
  for (long j = 0; j < x.cols(); ++j) y.col(j) = h.apply(x.col(j));
  return y;
}

// Orthonormalize columns, dropping near-dependent ones.
Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& x) {
  if (x.cols() == 0) return x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(x);
  qr.setThreshold(1e-12);
  const long rank = qr.rank();
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(x.rows(), rank);
  return q;
}

EigenResult solve_dense(const BlochHamiltonian& h, const SolverOptions& opt) {
  const Eigen::MatrixXcd mat = h.assemble_dense(opt.dense_cap);
  const long n = mat.rows();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat);
  if (es.info() != Eigen::Success)
    throw SolverError("dense Hermitian eigendecomposition failed");

  const int m = opt.m;
  std::vector<std::pair<double, long>> refined(m);
  for (int j = 0; j < m; ++j)
    refined[j] = {refined_rayleigh(mat, es.eigenvectors().col(j)), j};
  std::stable_sort(refined.begin(), refined.end());

  EigenResult out;
  out.path_taken = SolvePath::Dense;
  out.iterations = 0;
  out.eigenvalues.resize(m);
  out.eigenvectors.resize(n, m);
  out.residual_norms.resize(m);
  for (int j = 0; j < m; ++j) {
    out.eigenvalues[j] = refined[j].first;
    Eigen::VectorXcd v = es.eigenvectors().col(refined[j].second);
    v /= v.norm();
    out.eigenvectors.col(j) = v;
    out.residual_norms[j] = (h.apply(v) - out.eigenvalues[j] * v).norm();
  }
  return out;
}

EigenResult solve_iterative(const BlochHamiltonian& h, const SolverOptions& opt) {
  const long n = static_cast<long>(h.basis().size());
  const int m = opt.m;
  const int guard = std::max(2, m / 4);
  const long b0 = std::min<long>(n, m + guard);
  const Eigen::VectorXd& kin = h.kinetic_diag();

  // deterministic complex Gaussian start
  CounterRng rng(opt.seed);
  Eigen::MatrixXcd x(n, b0);
  for (long j = 0; j < b0; ++j)
    for (long i = 0; i < n; ++i)
      x(i, j) = rng.standard_normal_pair(static_cast<std::uint64_t>(j) * n + i);
  x = orthonormalize(x);

  Eigen::MatrixXcd locked(n, 0);
  std::vector<double> locked_vals;
  Eigen::MatrixXcd p(n, 0);

  Eigen::VectorXd best_res;
  auto project_out = [&](Eigen::MatrixXcd& block, const Eigen::MatrixXcd& q) {
    if (q.cols() > 0 && block.cols() > 0) block -= q * (q.adjoint() * block);
  };

  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    const long b = x.cols();
    Eigen::MatrixXcd ax = apply_block(h, x);

    // Rayleigh-Ritz inside the active block: rotate to Ritz vectors
    {
      Eigen::MatrixXcd g = x.adjoint() * ax;
      g = 0.5 * (g + g.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
      x = (x * es.eigenvectors()).eval();
      ax = (ax * es.eigenvectors()).eval();
    }
    Eigen::VectorXd theta(b);
    for (long j = 0; j < b; ++j)
      theta[j] = std::real(x.col(j).dot(ax.col(j)));  // dot conjugates the lhs

    Eigen::MatrixXcd r = ax - x * theta.asDiagonal();
    Eigen::VectorXd res = r.colwise().norm().transpose();
    best_res = res.head(std::min<long>(b, m - static_cast<long>(locked_vals.size())));

    // hard-lock converged leading pairs
    long nlock = 0;
    while (nlock < b && static_cast<long>(locked_vals.size()) + nlock <
                            static_cast<long>(m) &&
           res[nlock] <= opt.tol)
      ++nlock;
    if (nlock > 0) {
      locked.conservativeResize(n, locked.cols() + nlock);
      for (long j = 0; j < nlock; ++j) {
        locked.col(locked.cols() - nlock + j) = x.col(j);
        locked_vals.push_back(theta[j]);
      }
      x = x.rightCols(b - nlock).eval();
      ax = ax.rightCols(b - nlock).eval();
      r = r.rightCols(b - nlock).eval();
      theta = theta.tail(b - nlock).eval();
      if (p.cols() > nlock)
        p = p.rightCols(p.cols() - nlock).eval();
      else
        p.resize(n, 0);
    }
    if (static_cast<long>(locked_vals.size()) >= m) break;
    if (x.cols() == 0) break;  // everything locked yet m not reached: n < m guard

    // preconditioner (kinetic + sigma)^{-1}, sigma from the current lowest
    // Ritz values
    const long want = m - static_cast<long>(locked_vals.size());
    const long navg = std::min<long>(want, theta.size());
    double sigma = 1.0;
    if (navg > 0) sigma = std::max(1.0, theta.head(navg).mean());
    Eigen::ArrayXd damp = kin.array() + sigma;

    Eigen::MatrixXcd w = r;
    for (long j = 0; j < w.cols(); ++j) w.col(j).array() /= damp;

    project_out(w, locked);
    project_out(w, x);
    w = orthonormalize(w);

    Eigen::MatrixXcd s(n, x.cols() + w.cols() + p.cols());
    s.leftCols(x.cols()) = x;
    s.middleCols(x.cols(), w.cols()) = w;
    if (p.cols() > 0) s.rightCols(p.cols()) = p;
    project_out(s, locked);
    s = orthonormalize(s);

    Eigen::MatrixXcd as = apply_block(h, s);
    Eigen::MatrixXcd gs = s.adjoint() * as;
    gs = 0.5 * (gs + gs.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gs);

    const long bnew = std::min<long>(x.cols(), s.cols());
    const Eigen::MatrixXcd y = es.eigenvectors().leftCols(bnew);
    Eigen::MatrixXcd xnew = s * y;

    // implicit P: the part of the update outside the previous X
    Eigen::MatrixXcd pnew = xnew - x * (x.adjoint() * xnew);
    pnew = orthonormalize(pnew);
    if (pnew.cols() > bnew) pnew = pnew.leftCols(bnew).eval();

    x = orthonormalize(xnew);
    p = pnew;
  }

  if (static_cast<long>(locked_vals.size()) < m) {
    std::vector<double> best(best_res.data(), best_res.data() + best_res.size());
    throw SolverError("eigensolver did not converge within " +
                          std::to_string(opt.max_iter) + " block iterations",
                      best, iter);
  }

  // final clean pass over the locked set
  Eigen::MatrixXcd q = orthonormalize(locked);
  if (q.cols() < m)
    throw SolverError("converged subspace is rank-deficient", {}, iter);
  Eigen::MatrixXcd aq = apply_block(h, q);
  Eigen::MatrixXcd gq = q.adjoint() * aq;
  gq = 0.5 * (gq + gq.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gq);

  EigenResult out;
  out.path_taken = SolvePath::Iterative;
  out.iterations = iter + 1;
  out.eigenvalues.resize(m);
  out.eigenvectors.resize(n, m);
  out.residual_norms.resize(m);
  for (int j = 0; j < m; ++j) {
    out.eigenvalues[j] = es.eigenvalues()[j];
    Eigen::VectorXcd v = q * es.eigenvectors().col(j);
    v /= v.norm();
    out.eigenvectors.col(j) = v;
    out.residual_norms[j] = (h.apply(v) - out.eigenvalues[j] * v).norm();
  }
  return out;
}

}  // namespace

EigenResult lowest_eigenpairs(const BlochHamiltonian& h, const SolverOptions& opt) {
  const std::size_t n = h.basis().size();
  if (opt.m < 1 || static_cast<std::size_t>(opt.m) > n)
    throw std::invalid_argument("lowest_eigenpairs: need 1 <= m <= basis size");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("lowest_eigenpairs: tol must be > 0");

  SolvePath path = opt.path;
  if (path == SolvePath::Auto)
    path = (n <= opt.auto_dense_threshold && n <= opt.dense_cap) ? SolvePath::Dense
                                                                 : SolvePath::Iterative;
  return path == SolvePath::Dense ? solve_dense(h, opt) : solve_iterative(h, opt);
}

Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXcd& mat, int m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat);
  if (es.info() != Eigen::Success)
    throw SolverError("dense Hermitian eigendecomposition failed");
  const int count = m < 0 ? static_cast<int>(mat.rows()) : m;
  Eigen::VectorXd vals(count);
  for (int j = 0; j < count; ++j)
    vals[j] = refined_rayleigh(mat, es.eigenvectors().col(j));
  std::sort(vals.data(), vals.data() + count);
  return vals;
}

}  // namespace moire

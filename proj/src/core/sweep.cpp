#include "core/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace moire {

std::shared_ptr<const PlanewaveBasis> make_basis(const ProductCell& cell,
                                                 const BasisSpec& spec,
                                                 const KPoint& k, double delta) {
  if (spec.kind == BasisSpec::Kind::Box)
    return std::make_shared<PlanewaveBasis>(cell,
                                            BoxTruncation{spec.radius1, spec.radius2});
  return std::make_shared<PlanewaveBasis>(cell,
                                          EnergyCutTruncation{spec.ecut, k, delta});
}

namespace {

std::string k_label(const KPoint& k) {
  std::ostringstream os;
  os << "k~=(frac";
  for (int i = 0; i < k.frac1.size(); ++i) os << " " << k.frac1[i];
  os << " |";
  for (int i = 0; i < k.frac2.size(); ++i) os << " " << k.frac2[i];
  os << ")";
  return os.str();
}

EigenResult solve_fiber(const SweepProblem& prob,
                        const std::shared_ptr<const PlanewaveBasis>& shared_box,
                        const KPoint& k, double delta, long k_index,
                        int delta_index) {
  auto basis = shared_box ? shared_box : make_basis(prob.cell, prob.basis, k, delta);
  BlochHamiltonian h(basis, k.cart1(prob.cell), k.cart2(prob.cell), delta, prob.v1,
                     prob.v2);
  SolverOptions opt = prob.solver;
  opt.seed = mix_key(prob.seed_base,
                     mix_key(static_cast<std::uint64_t>(k_index),
                             static_cast<std::uint64_t>(delta_index)));
  return lowest_eigenpairs(h, opt);
}

}  // namespace

BandStructure band_structure(const SweepProblem& prob, double delta,
                             const std::vector<KPoint>& kpts, int delta_index) {
  if (!(delta > 0.0)) throw ConfigError("band_structure requires delta > 0");

  std::shared_ptr<const PlanewaveBasis> shared_box;
  if (prob.basis.kind == BasisSpec::Kind::Box)
    shared_box = make_basis(prob.cell, prob.basis, KPoint{}, delta);

  BandStructure bs;
  bs.kpoints = kpts;
  bs.delta = delta;
  bs.bands.resize(kpts.size(), prob.solver.m);

  parallel_for(kpts.size(), prob.workers, [&](std::size_t r) {
    try {
      const EigenResult res =
          solve_fiber(prob, shared_box, kpts[r], delta, static_cast<long>(r), delta_index);
      bs.bands.row(r) = res.eigenvalues.transpose();
    } catch (const SolverError& e) {
      throw SolverError("fiber " + std::to_string(r) + " " + k_label(kpts[r]) +
                            " at delta=" + std::to_string(delta) + ": " + e.what(),
                        e.best_residuals, e.iterations);
    }
  });

  for (long r = 0; r < bs.bands.rows(); ++r) {
    if (!bs.bands.row(r).allFinite())
      throw SolverError("non-finite band value at k index " + std::to_string(r));
    for (long j = 0; j + 1 < bs.bands.cols(); ++j)
      if (bs.bands(r, j) > bs.bands(r, j + 1))
        throw SolverError("band row not ascending at k index " + std::to_string(r));
  }
  return bs;
}

SpectrumEstimate spectrum_union(const BandStructure& bs) {
  SpectrumEstimate est;
  est.delta = bs.delta;
  est.coverage = bs.bands.rows();

  std::vector<Interval> raw;
  for (long j = 0; j < bs.bands.cols(); ++j)
    raw.push_back({bs.bands.col(j).minCoeff(), bs.bands.col(j).maxCoeff()});
  std::sort(raw.begin(), raw.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

  for (const auto& iv : raw) {
    if (!est.intervals.empty() && iv.lo <= est.intervals.back().hi)
      est.intervals.back().hi = std::max(est.intervals.back().hi, iv.hi);
    else
      est.intervals.push_back(iv);
  }
  return est;
}

namespace {

void linear_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                double& intercept, double& slope, double& rms) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  slope = (n * sxy - sx * sy) / denom;
  intercept = (sy - slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - intercept - slope * xs[i];
    ss += e * e;
  }
  rms = std::sqrt(ss / n);
}

}  // namespace

ContinuationTable delta_continuation(const SweepProblem& prob, const KPoint& k,
                                     const std::vector<double>& ladder, int k_index) {
  if (ladder.size() < 3)
    throw ConfigError("delta ladder needs at least 3 rungs for extrapolation");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw ConfigError("delta ladder values must be > 0");
    if (i > 0 && !(ladder[i] < ladder[i - 1]))
      throw ConfigError("delta ladder must be strictly descending");
  }

  const int m = prob.solver.m;
  const int nr = static_cast<int>(ladder.size());

  ContinuationTable tab;
  tab.k = k;
  tab.deltas = ladder;
  tab.values = Eigen::MatrixXd::Constant(nr, m, std::nan(""));

  std::shared_ptr<const PlanewaveBasis> shared_box;
  if (prob.basis.kind == BasisSpec::Kind::Box)
    shared_box = make_basis(prob.cell, prob.basis, k, ladder.front());

  std::vector<char> ok(nr, 0);
  // rungs are independent tasks; placement by rung index keeps determinism
  std::vector<std::string> errors(nr);
  parallel_for(nr, prob.workers, [&](std::size_t i) {
    try {
      const EigenResult res = solve_fiber(prob, shared_box, k, ladder[i],
                                          static_cast<long>(k_index), static_cast<int>(i));
      tab.values.row(i) = res.eigenvalues.transpose();
      ok[i] = 1;
    } catch (const SolverError& e) {
      errors[i] = e.what();
    }
  });
  for (int i = 0; i < nr; ++i)
    if (!ok[i]) tab.failed_rungs.emplace_back(i, errors[i]);

  // crossing diagnostic: a swapped pairing between adjacent rungs that moves
  // less than the index pairing suggests the sorted-index tracking crossed
  for (int i = 0; i + 1 < nr; ++i) {
    if (!ok[i] || !ok[i + 1]) continue;
    for (int j = 0; j + 1 < m; ++j) {
      const double straight = std::abs(tab.values(i, j) - tab.values(i + 1, j)) +
                              std::abs(tab.values(i, j + 1) - tab.values(i + 1, j + 1));
      const double swapped = std::abs(tab.values(i, j) - tab.values(i + 1, j + 1)) +
                             std::abs(tab.values(i, j + 1) - tab.values(i + 1, j));
      if (swapped < straight - 1e-12) tab.crossing_warnings.emplace_back(i + 1, j);
    }
  }

  // linear-in-delta fit over the three smallest successful rungs
  tab.extrapolated = Eigen::VectorXd::Constant(m, std::nan(""));
  tab.fit_slope = Eigen::VectorXd::Constant(m, std::nan(""));
  tab.fit_residual = Eigen::VectorXd::Constant(m, std::nan(""));

  std::vector<int> fit_rungs;
  for (int i = nr - 1; i >= 0 && fit_rungs.size() < 3; --i)
    if (ok[i]) fit_rungs.push_back(i);
  if (fit_rungs.size() == 3) {
    for (int j = 0; j < m; ++j) {
      std::vector<double> xs, ys;
      for (int idx : fit_rungs) {
        xs.push_back(ladder[idx]);
        ys.push_back(tab.values(idx, j));
      }
      double b0, b1, rms;
      linear_fit(xs, ys, b0, b1, rms);
      tab.extrapolated[j] = b0;
      tab.fit_slope[j] = b1;
      tab.fit_residual[j] = rms;
    }
  }
  return tab;
}

SpectrumEstimate spectrum_at_zero(const SweepProblem& prob,
                                  const std::vector<KPoint>& kpts,
                                  const std::vector<double>& ladder) {
  const int m = prob.solver.m;
  Eigen::MatrixXd extrap(kpts.size(), m);
  std::vector<std::string> failures(kpts.size());

  // outer parallelism over grid points; force the rung loop inline
  SweepProblem inner = prob;
  inner.workers = 1;
  parallel_for(kpts.size(), prob.workers, [&](std::size_t r) {
    const ContinuationTable tab =
        delta_continuation(inner, kpts[r], ladder, static_cast<int>(r));
    if (!tab.failed_rungs.empty()) {
      failures[r] = "k index " + std::to_string(r) + ": rung " +
                    std::to_string(tab.failed_rungs.front().first) + ": " +
                    tab.failed_rungs.front().second;
      return;
    }
    extrap.row(r) = tab.extrapolated.transpose();
  });

  std::string all;
  int nfail = 0;
  for (const auto& f : failures)
    if (!f.empty()) {
      ++nfail;
      if (all.size() < 2000) all += (all.empty() ? "" : "; ") + f;
    }
  if (nfail > 0)
    throw SolverError("spectrum_at_zero: " + std::to_string(nfail) +
                      " grid point(s) failed: " + all);

  BandStructure pseudo;
  pseudo.kpoints = kpts;
  pseudo.delta = 0.0;
  pseudo.bands = extrap;
  SpectrumEstimate est = spectrum_union(pseudo);
  est.delta.reset();  // extrapolated
  return est;
}

std::vector<Interval> spectrum_gaps(const SpectrumEstimate& est) {
  std::vector<Interval> gaps;
  for (std::size_t i = 0; i + 1 < est.intervals.size(); ++i)
    gaps.push_back({est.intervals[i].hi, est.intervals[i + 1].lo});
  return gaps;
}

}  // namespace moire

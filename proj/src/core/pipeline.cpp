#include "core/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "core/artifacts.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace moire {

namespace fs = std::filesystem;

namespace {

double bands_delta_of(const RunConfig& cfg) {
  return cfg.bands_delta > 0 ? cfg.bands_delta : cfg.ladder.front();
}

RunStatus do_check(const RunConfig& cfg, const std::string& out_dir, std::ostream& log,
                   std::string* message) {
  ModelObjects model = build_model(cfg);
  const auto verdict = incommensurability_check(model.cell.lat1(), model.cell.lat2(),
                                                cfg.qmax, cfg.incommensurability_tol);
  write_check_report(out_dir + "/check_report.txt", cfg, verdict);
  log << "verdict: " << verdict.to_string() << "\n";
  if (message) *message = verdict.to_string();
  return RunStatus::Ok;
}

RunStatus do_bands(const RunConfig& cfg, const std::string& out_dir, int workers,
                   std::ostream& log) {
  SweepProblem prob = build_sweep_problem(cfg, workers);
  const auto kpts = kgrid(prob.cell, cfg.kgrid_n);
  const BandStructure bs = band_structure(prob, bands_delta_of(cfg), kpts);
  write_bands_csv(out_dir + "/bands.csv", cfg, bs);
  write_bands_plot(out_dir + "/bands_plot.dat", cfg, bs);
  log << "wrote " << out_dir << "/bands.csv (" << kpts.size() << " k-points, "
      << cfg.solver.m << " bands)\n";
  return RunStatus::Ok;
}

RunStatus do_continuation(const RunConfig& cfg, const std::string& out_dir, int workers,
                          std::ostream& log, std::string* message) {
  SweepProblem prob = build_sweep_problem(cfg, workers);
  const KPoint k{cfg.res_k_frac, cfg.res_kp_frac};
  const ContinuationTable tab = delta_continuation(prob, k, cfg.ladder);
  write_continuation_csv(out_dir + "/continuation.csv", cfg, tab);
  log << "wrote " << out_dir << "/continuation.csv\n";
  if (!tab.failed_rungs.empty()) {
    if (message)
      *message = "continuation: " + std::to_string(tab.failed_rungs.size()) +
                 " rung(s) failed; partial table written";
    return RunStatus::SolverFailure;
  }
  return RunStatus::Ok;
}

RunStatus do_spectrum(const RunConfig& cfg, const std::string& out_dir, int workers,
                      std::ostream& log) {
  SweepProblem prob = build_sweep_problem(cfg, workers);
  const auto kpts = kgrid(prob.cell, cfg.kgrid_n);
  const SpectrumEstimate est = spectrum_at_zero(prob, kpts, cfg.ladder);
  write_spectrum_csv(out_dir + "/spectrum.csv", cfg, est);
  write_spectrum_plot(out_dir + "/spectrum_plot.dat", cfg, est);
  log << "wrote " << out_dir << "/spectrum.csv (" << est.intervals.size()
      << " interval(s))\n";
  return RunStatus::Ok;
}

RunStatus do_residual(const RunConfig& cfg, const std::string& out_dir, int workers,
                      std::ostream& log) {
  SweepProblem prob = build_sweep_problem(cfg, workers);
  const KPoint k{cfg.res_k_frac, cfg.res_kp_frac};

  auto basis = make_basis(prob.cell, prob.basis, k, cfg.res_delta);
  BlochHamiltonian h(basis, k.cart1(prob.cell), k.cart2(prob.cell), cfg.res_delta,
                     prob.v1, prob.v2);
  SolverOptions opt = prob.solver;
  opt.m = std::max(opt.m, cfg.res_band);
  opt.seed = mix_key(prob.seed_base, 0x7265736964ULL);
  const EigenResult res = lowest_eigenpairs(h, opt);

  const int j = cfg.res_band - 1;
  BlochSolution sol = BlochSolution::from_eigenpair(basis, k, cfg.res_delta,
                                                    res.eigenvalues[j],
                                                    res.eigenvectors.col(j));
  ResidualReport rep = exact_residual(sol);
  for (double radius : cfg.res_radii)
    rep.ball_residuals.emplace_back(radius,
                                    ball_residual(sol, radius, cfg.res_quad_ppu, workers));

  const QuasiPeriodicFunction qp = reconstruct_diagonal(sol);
  write_residual_report(out_dir + "/residual_report.txt", cfg, rep, sol);
  write_qp_terms_csv(out_dir + "/qp_terms.csv", cfg, qp);
  log << "wrote " << out_dir << "/residual_report.txt (relative ms residual "
      << format_double(rep.relative_ms_residual) << ")\n";
  return RunStatus::Ok;
}

RunStatus do_reference(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const RealSpaceProblem p = build_realspace_problem(cfg);
  const auto vals = realspace_spectrum(p, cfg.ref_m);
  write_reference_csv(out_dir + "/reference.csv", cfg, vals);
  log << "wrote " << out_dir << "/reference.csv (" << vals.size() << " eigenvalues)\n";
  return RunStatus::Ok;
}

RunStatus do_compare(const RunConfig& cfg, const std::string& out_dir, int workers,
                     std::ostream& log, std::string* message) {
  // reuse artifacts in out_dir when present; refuse mismatched models
  std::string spectrum_source = "computed";
  std::string reference_source = "computed";

  SpectrumEstimate est;
  const std::string spath = out_dir + "/spectrum.csv";
  if (fs::exists(spath)) {
    LoadedSpectrum loaded = load_spectrum_csv(spath);
    if (loaded.model_hash != cfg.model_hash) {
      if (message)
        *message = "compare: spectrum artifact " + spath + " has model hash " +
                   loaded.model_hash + " but the config model hash is " + cfg.model_hash +
                   "; refusing to compare unlike models";
      return RunStatus::CompareFailure;
    }
    est = loaded.estimate;
    spectrum_source = spath;
  } else {
    SweepProblem prob = build_sweep_problem(cfg, workers);
    est = spectrum_at_zero(prob, kgrid(prob.cell, cfg.kgrid_n), cfg.ladder);
    write_spectrum_csv(spath, cfg, est);
    write_spectrum_plot(out_dir + "/spectrum_plot.dat", cfg, est);
  }

  std::vector<double> ref;
  const std::string rpath = out_dir + "/reference.csv";
  if (fs::exists(rpath)) {
    LoadedReference loaded = load_reference_csv(rpath);
    if (loaded.model_hash != cfg.model_hash) {
      if (message)
        *message = "compare: reference artifact " + rpath + " has model hash " +
                   loaded.model_hash + " but the config model hash is " + cfg.model_hash +
                   "; refusing to compare unlike models";
      return RunStatus::CompareFailure;
    }
    ref = loaded.eigenvalues;
    reference_source = rpath;
  } else {
    ref = realspace_spectrum(build_realspace_problem(cfg), cfg.ref_m);
    write_reference_csv(rpath, cfg, ref);
  }

  double lo = cfg.ref_window_lo, hi = cfg.ref_window_hi;
  if (cfg.ref_window_relative) {
    const double base = *std::min_element(ref.begin(), ref.end());
    lo += base;
    hi += base;
  }

  const double disp = fd_dispersion_error(cfg.ref_spacing, std::max(std::abs(lo), std::abs(hi)));
  if (disp >= cfg.compare_tolerance)
    throw ConfigError("reference grid too coarse: FD dispersion error " +
                      format_double(disp) + " is not below the comparison tolerance " +
                      format_double(cfg.compare_tolerance));

  const double dist = hausdorff_window(ref, est.intervals, lo, hi);
  const bool ok = dist <= cfg.compare_tolerance;
  write_compare_report(out_dir + "/compare_report.txt", cfg, dist, lo, hi, ok,
                       spectrum_source, reference_source);
  log << "hausdorff distance " << format_double(dist) << " vs tolerance "
      << format_double(cfg.compare_tolerance) << " -> " << (ok ? "PASS" : "FAIL") << "\n";
  if (message)
    *message = "hausdorff distance " + format_double(dist) + (ok ? " within " : " above ") +
               "tolerance " + format_double(cfg.compare_tolerance);
  return ok ? RunStatus::Ok : RunStatus::CompareFailure;
}

}  // namespace

RunStatus run_subcommand(const std::string& name, const RunConfig& cfg,
                         const std::string& out_dir, int workers, bool verbose,
                         std::ostream& log, std::string* message) {
  std::ostringstream devnull;
  std::ostream& out = verbose ? log : devnull;
  try {
    ensure_directory(out_dir);
    if (name == "check") return do_check(cfg, out_dir, out, message);
    if (name == "bands") return do_bands(cfg, out_dir, workers, out);
    if (name == "continuation") return do_continuation(cfg, out_dir, workers, out, message);
    if (name == "spectrum") return do_spectrum(cfg, out_dir, workers, out);
    if (name == "residual") return do_residual(cfg, out_dir, workers, out);
    if (name == "reference") return do_reference(cfg, out_dir, out);
    if (name == "compare") return do_compare(cfg, out_dir, workers, out, message);
    if (message) *message = "unknown subcommand: " + name;
    return RunStatus::InvalidArgument;
  } catch (const ConfigError& e) {
    if (message) *message = e.what();
    return RunStatus::ConfigProblem;
  } catch (const SolverError& e) {
    if (message) *message = e.what();
    return RunStatus::SolverFailure;
  } catch (const IoError& e) {
    if (message) *message = e.what();
    return RunStatus::IoProblem;
  } catch (const std::invalid_argument& e) {
    if (message) *message = e.what();
    return RunStatus::InvalidArgument;
  } catch (const std::exception& e) {
    if (message) *message = e.what();
    return RunStatus::InternalError;
  }
}

}  // namespace moire

#include "moire/moire.h"

#include <cstring>
#include <iostream>
#include <string>

#include "core/artifacts.hpp"
#include "core/errors.hpp"
#include "core/pipeline.hpp"
#include "core/rng.hpp"

namespace {

thread_local std::string g_last_error = "no error";

moire_status set_error(moire_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Uniform exception -> status mapping for every entry point.
template <typename Fn>
moire_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const moire::ConfigError& e) {
    return set_error(MOIRE_ERR_CONFIG, e.what());
  } catch (const moire::SolverError& e) {
    return set_error(MOIRE_ERR_SOLVER, e.what());
  } catch (const moire::IoError& e) {
    return set_error(MOIRE_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return set_error(MOIRE_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(MOIRE_ERR_INTERNAL, "unknown error");
  }
}

moire_status copy_hex(const std::string& hex, char* buf, size_t buflen) {
  if (!buf) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null buffer");
  if (buflen < hex.size() + 1)
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "buffer too small (need 17 bytes)");
  std::memcpy(buf, hex.c_str(), hex.size() + 1);
  return MOIRE_OK;
}

}  // namespace

struct moire_config {
  moire::RunConfig cfg;
};
struct moire_bands {
  moire::BandStructure bs;
};
struct moire_spectrum {
  moire::SpectrumEstimate est;
};
struct moire_continuation {
  moire::ContinuationTable tab;
};
struct moire_residual {
  moire::ResidualReport rep;
};
struct moire_reference {
  std::vector<double> eigenvalues;
};

extern "C" {

const char* moire_version(void) { return "0.1.0"; }

const char* moire_status_name(moire_status status) {
  switch (status) {
    case MOIRE_OK: return "ok";
    case MOIRE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MOIRE_ERR_CONFIG: return "config error";
    case MOIRE_ERR_SOLVER: return "solver failure";
    case MOIRE_ERR_COMPARE: return "comparison failure";
    case MOIRE_ERR_IO: return "io error";
    case MOIRE_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* moire_last_error(void) { return g_last_error.c_str(); }

moire_status moire_config_load(const char* path, moire_config** out) {
  if (!path || !out) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto* handle = new moire_config{moire::parse_config_file(path)};
    *out = handle;
    return MOIRE_OK;
  });
}

moire_status moire_config_parse(const char* json_text, const char* base_dir,
                                moire_config** out) {
  if (!json_text || !out) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto* handle = new moire_config{
        moire::parse_config_text(json_text, base_dir ? base_dir : ".")};
    *out = handle;
    return MOIRE_OK;
  });
}

void moire_config_free(moire_config* cfg) { delete cfg; }

moire_status moire_config_hash(const moire_config* cfg, char* buf, size_t buflen) {
  if (!cfg) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null config");
  return copy_hex(cfg->cfg.config_hash, buf, buflen);
}

moire_status moire_config_model_hash(const moire_config* cfg, char* buf, size_t buflen) {
  if (!cfg) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null config");
  return copy_hex(cfg->cfg.model_hash, buf, buflen);
}

moire_status moire_run(const moire_config* cfg, const char* subcommand,
                       const char* out_dir, int workers, int verbose) {
  if (!cfg || !subcommand) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  const std::string dir = out_dir ? out_dir : cfg->cfg.out_dir;
  std::string message;
  const moire::RunStatus status = moire::run_subcommand(
      subcommand, cfg->cfg, dir, workers, verbose != 0, std::cerr, &message);
  if (status == moire::RunStatus::Ok) return MOIRE_OK;
  return set_error(static_cast<moire_status>(status),
                   message.empty() ? "pipeline failure" : message);
}

moire_status moire_check(const moire_config* cfg, int* commensurate, int* witness_m,
                         int* witness_n, int* qmax_used) {
  if (!cfg || !commensurate) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    moire::ModelObjects model = moire::build_model(cfg->cfg);
    const auto verdict =
        moire::incommensurability_check(model.cell.lat1(), model.cell.lat2(),
                                        cfg->cfg.qmax, cfg->cfg.incommensurability_tol);
    *commensurate = verdict.commensurate ? 1 : 0;
    if (qmax_used) *qmax_used = verdict.qmax;
    if (verdict.commensurate && witness_m && witness_n)
      for (int i = 0; i < cfg->cfg.dim; ++i) {
        witness_m[i] = verdict.m[i];
        witness_n[i] = verdict.n[i];
      }
    return MOIRE_OK;
  });
}

moire_status moire_check_verdict(const moire_config* cfg, char* buf, size_t buflen) {
  if (!cfg || !buf) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    moire::ModelObjects model = moire::build_model(cfg->cfg);
    const auto verdict =
        moire::incommensurability_check(model.cell.lat1(), model.cell.lat2(),
                                        cfg->cfg.qmax, cfg->cfg.incommensurability_tol);
    const std::string text = verdict.to_string();
    if (buflen < text.size() + 1)
      return set_error(MOIRE_ERR_INVALID_ARGUMENT, "buffer too small");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return MOIRE_OK;
  });
}

moire_status moire_compute_bands(const moire_config* cfg, double delta, int workers,
                                 moire_bands** out) {
  if (!cfg || !out) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    moire::SweepProblem prob = moire::build_sweep_problem(cfg->cfg, workers);
    const auto kpts = moire::kgrid(prob.cell, cfg->cfg.kgrid_n);
    auto* handle = new moire_bands{moire::band_structure(prob, delta, kpts)};
    *out = handle;
    return MOIRE_OK;
  });
}

size_t moire_bands_num_kpoints(const moire_bands* bands) {
  return bands ? bands->bs.kpoints.size() : 0;
}

size_t moire_bands_num_bands(const moire_bands* bands) {
  return bands ? static_cast<size_t>(bands->bs.bands.cols()) : 0;
}

moire_status moire_bands_value(const moire_bands* bands, size_t k_index,
                               size_t band_index, double* value) {
  if (!bands || !value) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  if (k_index >= bands->bs.kpoints.size() ||
      band_index >= static_cast<size_t>(bands->bs.bands.cols()))
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "index out of range");
  *value = bands->bs.bands(k_index, band_index);
  return MOIRE_OK;
}

moire_status moire_bands_kpoint(const moire_bands* bands, size_t k_index,
                                double* k_frac, double* kp_frac) {
  if (!bands || !k_frac || !kp_frac)
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  if (k_index >= bands->bs.kpoints.size())
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "index out of range");
  const auto& kp = bands->bs.kpoints[k_index];
  for (int i = 0; i < kp.frac1.size(); ++i) k_frac[i] = kp.frac1[i];
  for (int i = 0; i < kp.frac2.size(); ++i) kp_frac[i] = kp.frac2[i];
  return MOIRE_OK;
}

void moire_bands_free(moire_bands* bands) { delete bands; }

moire_status moire_compute_spectrum(const moire_config* cfg, int workers,
                                    moire_spectrum** out) {
  if (!cfg || !out) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    moire::SweepProblem prob = moire::build_sweep_problem(cfg->cfg, workers);
    const auto kpts = moire::kgrid(prob.cell, cfg->cfg.kgrid_n);
    auto* handle =
        new moire_spectrum{moire::spectrum_at_zero(prob, kpts, cfg->cfg.ladder)};
    *out = handle;
    return MOIRE_OK;
  });
}

size_t moire_spectrum_num_intervals(const moire_spectrum* spectrum) {
  return spectrum ? spectrum->est.intervals.size() : 0;
}

moire_status moire_spectrum_interval(const moire_spectrum* spectrum, size_t index,
                                     double* lo, double* hi) {
  if (!spectrum || !lo || !hi) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  if (index >= spectrum->est.intervals.size())
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "index out of range");
  *lo = spectrum->est.intervals[index].lo;
  *hi = spectrum->est.intervals[index].hi;
  return MOIRE_OK;
}

void moire_spectrum_free(moire_spectrum* spectrum) { delete spectrum; }

moire_status moire_compute_continuation(const moire_config* cfg, int workers,
                                        moire_continuation** out) {
  if (!cfg || !out) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    moire::SweepProblem prob = moire::build_sweep_problem(cfg->cfg, workers);
    const moire::KPoint k{cfg->cfg.res_k_frac, cfg->cfg.res_kp_frac};
    auto* handle =
        new moire_continuation{moire::delta_continuation(prob, k, cfg->cfg.ladder)};
    if (!handle->tab.failed_rungs.empty()) {
      const auto failure = handle->tab.failed_rungs.front();
      delete handle;
      return set_error(MOIRE_ERR_SOLVER, "continuation rung " +
                                             std::to_string(failure.first) +
                                             " failed: " + failure.second);
    }
    *out = handle;
    return MOIRE_OK;
  });
}

size_t moire_continuation_num_rungs(const moire_continuation* table) {
  return table ? table->tab.deltas.size() : 0;
}

size_t moire_continuation_num_bands(const moire_continuation* table) {
  return table ? static_cast<size_t>(table->tab.values.cols()) : 0;
}

moire_status moire_continuation_value(const moire_continuation* table, size_t rung,
                                      size_t band, double* delta, double* value) {
  if (!table || !delta || !value)
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  if (rung >= table->tab.deltas.size() ||
      band >= static_cast<size_t>(table->tab.values.cols()))
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "index out of range");
  *delta = table->tab.deltas[rung];
  *value = table->tab.values(rung, band);
  return MOIRE_OK;
}

moire_status moire_continuation_extrapolated(const moire_continuation* table,
                                             size_t band, double* value) {
  if (!table || !value) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  if (band >= static_cast<size_t>(table->tab.extrapolated.size()))
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "index out of range");
  *value = table->tab.extrapolated[band];
  return MOIRE_OK;
}

void moire_continuation_free(moire_continuation* table) { delete table; }

moire_status moire_compute_residual(const moire_config* cfg, int workers,
                                    moire_residual** out) {
  if (!cfg || !out) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const moire::RunConfig& rc = cfg->cfg;
    moire::SweepProblem prob = moire::build_sweep_problem(rc, workers);
    const moire::KPoint k{rc.res_k_frac, rc.res_kp_frac};
    auto basis = moire::make_basis(prob.cell, prob.basis, k, rc.res_delta);
    moire::BlochHamiltonian h(basis, k.cart1(prob.cell), k.cart2(prob.cell),
                              rc.res_delta, prob.v1, prob.v2);
    moire::SolverOptions opt = prob.solver;
    opt.m = std::max(opt.m, rc.res_band);
    opt.seed = moire::mix_key(prob.seed_base, 0x7265736964ULL);
    const moire::EigenResult res = moire::lowest_eigenpairs(h, opt);
    const int j = rc.res_band - 1;
    moire::BlochSolution sol = moire::BlochSolution::from_eigenpair(
        basis, k, rc.res_delta, res.eigenvalues[j], res.eigenvectors.col(j));
    auto* handle = new moire_residual{moire::exact_residual(sol)};
    for (double radius : rc.res_radii)
      handle->rep.ball_residuals.emplace_back(
          radius, moire::ball_residual(sol, radius, rc.res_quad_ppu, workers));
    *out = handle;
    return MOIRE_OK;
  });
}

moire_status moire_residual_exact(const moire_residual* report, double* value) {
  if (!report || !value) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  *value = report->rep.relative_ms_residual;
  return MOIRE_OK;
}

moire_status moire_residual_lambda(const moire_residual* report, double* value) {
  if (!report || !value) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  *value = report->rep.lambda;
  return MOIRE_OK;
}

size_t moire_residual_num_ball_values(const moire_residual* report) {
  return report ? report->rep.ball_residuals.size() : 0;
}

moire_status moire_residual_ball_value(const moire_residual* report, size_t index,
                                       double* radius, double* value) {
  if (!report || !radius || !value)
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  if (index >= report->rep.ball_residuals.size())
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "index out of range");
  *radius = report->rep.ball_residuals[index].first;
  *value = report->rep.ball_residuals[index].second;
  return MOIRE_OK;
}

void moire_residual_free(moire_residual* report) { delete report; }

moire_status moire_compute_reference(const moire_config* cfg, moire_reference** out) {
  if (!cfg || !out) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const moire::RealSpaceProblem p = moire::build_realspace_problem(cfg->cfg);
    auto* handle = new moire_reference{moire::realspace_spectrum(p, cfg->cfg.ref_m)};
    *out = handle;
    return MOIRE_OK;
  });
}

size_t moire_reference_num_eigenvalues(const moire_reference* reference) {
  return reference ? reference->eigenvalues.size() : 0;
}

moire_status moire_reference_eigenvalue(const moire_reference* reference, size_t index,
                                        double* value) {
  if (!reference || !value) return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  if (index >= reference->eigenvalues.size())
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "index out of range");
  *value = reference->eigenvalues[index];
  return MOIRE_OK;
}

void moire_reference_free(moire_reference* reference) { delete reference; }

moire_status moire_compare(const moire_spectrum* spectrum,
                           const moire_reference* reference, double window_lo,
                           double window_hi, double tolerance, double* distance,
                           int* within_tolerance) {
  if (!spectrum || !reference || !distance || !within_tolerance)
    return set_error(MOIRE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const double d = moire::hausdorff_window(reference->eigenvalues,
                                             spectrum->est.intervals, window_lo,
                                             window_hi);
    *distance = d;
    *within_tolerance = d <= tolerance ? 1 : 0;
    return MOIRE_OK;
  });
}

}  // extern "C"

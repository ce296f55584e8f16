#pragma once

#include <string>
#include <vector>

#include "core/bloch.hpp"
#include "core/config.hpp"
#include "core/geometry.hpp"
#include "core/sweep.hpp"

namespace moire {

// Every writer embeds the config hash, the model (lattice+potential) hash and
// the normalized config so artifacts are self-describing and reruns of the
// same config are byte-identical. Numbers are printed with %.17g: exact
// round-trip for doubles, no locale dependence.

std::string format_double(double v);

void write_bands_csv(const std::string& path, const RunConfig& cfg, const BandStructure& bs);
void write_bands_plot(const std::string& path, const RunConfig& cfg, const BandStructure& bs);

void write_spectrum_csv(const std::string& path, const RunConfig& cfg,
                        const SpectrumEstimate& est);
void write_spectrum_plot(const std::string& path, const RunConfig& cfg,
                         const SpectrumEstimate& est);

void write_continuation_csv(const std::string& path, const RunConfig& cfg,
                            const ContinuationTable& tab);

void write_residual_report(const std::string& path, const RunConfig& cfg,
                           const ResidualReport& rep, const BlochSolution& sol);
void write_qp_terms_csv(const std::string& path, const RunConfig& cfg,
                        const QuasiPeriodicFunction& f);

void write_reference_csv(const std::string& path, const RunConfig& cfg,
                         const std::vector<double>& eigenvalues);

void write_compare_report(const std::string& path, const RunConfig& cfg, double distance,
                          double window_lo, double window_hi, bool within_tolerance,
                          const std::string& spectrum_source,
                          const std::string& reference_source);

void write_check_report(const std::string& path, const RunConfig& cfg,
                        const CommensurabilityVerdict& verdict);

/// Loaded artifact with its embedded model hash, for like-for-like checks.
struct LoadedSpectrum {
  SpectrumEstimate estimate;
  std::string model_hash;
};
struct LoadedReference {
  std::vector<double> eigenvalues;
  std::string model_hash;
};

LoadedSpectrum load_spectrum_csv(const std::string& path);
LoadedReference load_reference_csv(const std::string& path);

void ensure_directory(const std::string& path);

}  // namespace moire

#include "core/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace moire {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void write_provenance(std::ofstream& out, const RunConfig& cfg) {
  out << "# config_hash: " << cfg.config_hash << "\n";
  out << "# model_hash: " << cfg.model_hash << "\n";
  out << "# config:\n";
  std::istringstream lines(cfg.canonical_json);
  std::string line;
  while (std::getline(lines, line)) out << "#   " << line << "\n";
}

}  // namespace

void write_bands_csv(const std::string& path, const RunConfig& cfg, const BandStructure& bs) {
  auto out = open_out(path);
  write_provenance(out, cfg);
  out << "# delta: " << format_double(bs.delta) << "\n";
  out << "# k_index";
  for (int i = 0; i < cfg.dim; ++i) out << ", k_frac_" << (i + 1);
  for (int i = 0; i < cfg.dim; ++i) out << ", kp_frac_" << (i + 1);
  for (long j = 0; j < bs.bands.cols(); ++j) out << ", band_" << (j + 1);
  out << "\n";
  for (std::size_t r = 0; r < bs.kpoints.size(); ++r) {
    out << r;
    for (int i = 0; i < cfg.dim; ++i) out << ", " << format_double(bs.kpoints[r].frac1[i]);
    for (int i = 0; i < cfg.dim; ++i) out << ", " << format_double(bs.kpoints[r].frac2[i]);
    for (long j = 0; j < bs.bands.cols(); ++j) out << ", " << format_double(bs.bands(r, j));
    out << "\n";
  }
}

void write_bands_plot(const std::string& path, const RunConfig& cfg, const BandStructure& bs) {
  auto out = open_out(path);
  out << "# gnuplot data: blocks per band, columns k_index lambda\n";
  out << "# config_hash: " << cfg.config_hash << "\n";
  for (long j = 0; j < bs.bands.cols(); ++j) {
    out << "# band " << (j + 1) << "\n";
    for (long r = 0; r < bs.bands.rows(); ++r)
      out << r << " " << format_double(bs.bands(r, j)) << "\n";
    out << "\n\n";
  }
}

void write_spectrum_csv(const std::string& path, const RunConfig& cfg,
                        const SpectrumEstimate& est) {
  auto out = open_out(path);
  write_provenance(out, cfg);
  if (est.delta)
    out << "# delta: " << format_double(*est.delta) << "\n";
  else
    out << "# delta: extrapolated\n";
  out << "# coverage: " << est.coverage << "\n";
  const auto gaps = spectrum_gaps(est);
  for (const auto& g : gaps)
    out << "# gap: " << format_double(g.lo) << " .. " << format_double(g.hi) << "\n";
  out << "# lo, hi\n";
  for (const auto& iv : est.intervals)
    out << format_double(iv.lo) << ", " << format_double(iv.hi) << "\n";
}

void write_spectrum_plot(const std::string& path, const RunConfig& cfg,
                         const SpectrumEstimate& est) {
  auto out = open_out(path);
  out << "# gnuplot data: one block per interval, columns energy index\n";
  out << "# config_hash: " << cfg.config_hash << "\n";
  long idx = 0;
  for (const auto& iv : est.intervals) {
    out << format_double(iv.lo) << " " << idx << "\n";
    out << format_double(iv.hi) << " " << idx << "\n\n\n";
    ++idx;
  }
}

void write_continuation_csv(const std::string& path, const RunConfig& cfg,
                            const ContinuationTable& tab) {
  auto out = open_out(path);
  write_provenance(out, cfg);
  out << "# k_frac:";
  for (int i = 0; i < tab.k.frac1.size(); ++i) out << " " << format_double(tab.k.frac1[i]);
  out << "  kp_frac:";
  for (int i = 0; i < tab.k.frac2.size(); ++i) out << " " << format_double(tab.k.frac2[i]);
  out << "\n";
  for (const auto& [rung, msg] : tab.failed_rungs)
    out << "# failed_rung: " << rung << " (" << msg << ")\n";
  for (const auto& [rung, band] : tab.crossing_warnings)
    out << "# crossing_warning: rung " << rung << " band " << (band + 1) << "\n";
  out << "# delta";
  for (long j = 0; j < tab.values.cols(); ++j) out << ", band_" << (j + 1);
  out << "\n";
  for (std::size_t i = 0; i < tab.deltas.size(); ++i) {
    out << format_double(tab.deltas[i]);
    for (long j = 0; j < tab.values.cols(); ++j)
      out << ", " << format_double(tab.values(i, j));
    out << "\n";
  }
  out << "# extrapolated";
  for (long j = 0; j < tab.extrapolated.size(); ++j)
    out << ", " << format_double(tab.extrapolated[j]);
  out << "\n";
  out << "# fit_slope";
  for (long j = 0; j < tab.fit_slope.size(); ++j)
    out << ", " << format_double(tab.fit_slope[j]);
  out << "\n";
  out << "# fit_residual";
  for (long j = 0; j < tab.fit_residual.size(); ++j)
    out << ", " << format_double(tab.fit_residual[j]);
  out << "\n";
}

void write_residual_report(const std::string& path, const RunConfig& cfg,
                           const ResidualReport& rep, const BlochSolution& sol) {
  auto out = open_out(path);
  write_provenance(out, cfg);
  out << "residual_report:\n";
  out << "  lambda: " << format_double(rep.lambda) << "\n";
  out << "  delta: " << format_double(rep.delta) << "\n";
  out << "  k_frac:";
  for (int i = 0; i < sol.k.frac1.size(); ++i) out << " " << format_double(sol.k.frac1[i]);
  out << "\n  kp_frac:";
  for (int i = 0; i < sol.k.frac2.size(); ++i) out << " " << format_double(sol.k.frac2[i]);
  out << "\n";
  out << "  relative_ms_residual: " << format_double(rep.relative_ms_residual) << "\n";
  out << "  parseval_bound: " << format_double(rep.bound) << "\n";
  out << "  exact: " << (rep.exact ? "true" : "false") << "\n";
  out << "  ball_residuals:\n";
  for (const auto& [r, v] : rep.ball_residuals)
    out << "    - R: " << format_double(r) << "  value: " << format_double(v) << "\n";
}

void write_qp_terms_csv(const std::string& path, const RunConfig& cfg,
                        const QuasiPeriodicFunction& f) {
  auto out = open_out(path);
  write_provenance(out, cfg);
  out << "# omega";
  if (!f.terms.empty() && f.terms.front().omega.size() == 2) out << "_1, omega_2";
  out << ", re, im\n";
  for (const auto& t : f.terms) {
    for (int i = 0; i < t.omega.size(); ++i)
      out << (i ? ", " : "") << format_double(t.omega[i]);
    out << ", " << format_double(t.amplitude.real()) << ", "
        << format_double(t.amplitude.imag()) << "\n";
  }
}

void write_reference_csv(const std::string& path, const RunConfig& cfg,
                         const std::vector<double>& eigenvalues) {
  auto out = open_out(path);
  write_provenance(out, cfg);
  out << "# eigenvalue\n";
  for (double v : eigenvalues) out << format_double(v) << "\n";
}

void write_compare_report(const std::string& path, const RunConfig& cfg, double distance,
                          double window_lo, double window_hi, bool within_tolerance,
                          const std::string& spectrum_source,
                          const std::string& reference_source) {
  auto out = open_out(path);
  write_provenance(out, cfg);
  out << "compare_report:\n";
  out << "  window: [" << format_double(window_lo) << ", " << format_double(window_hi)
      << "]\n";
  out << "  hausdorff_distance: " << format_double(distance) << "\n";
  out << "  tolerance: " << format_double(cfg.compare_tolerance) << "\n";
  out << "  verdict: " << (within_tolerance ? "PASS" : "FAIL") << "\n";
  out << "  spectrum_source: " << spectrum_source << "\n";
  out << "  reference_source: " << reference_source << "\n";
  out << "  note: the real-space oracle carries O(1/L) windowed band-edge error and\n";
  out << "        O(h^2) dispersion error; the tolerance is an engineering choice.\n";
}

void write_check_report(const std::string& path, const RunConfig& cfg,
                        const CommensurabilityVerdict& verdict) {
  auto out = open_out(path);
  write_provenance(out, cfg);
  out << "check_report:\n";
  out << "  verdict: " << verdict.to_string() << "\n";
  out << "  qmax: " << verdict.qmax << "\n";
  out << "  tol: " << format_double(verdict.tol) << "\n";
}

namespace {

std::string header_value(const std::string& line, const std::string& key) {
  const std::string prefix = "# " + key + ": ";
  if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

}  // namespace

LoadedSpectrum load_spectrum_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spectrum artifact " + path);
  LoadedSpectrum loaded;
  loaded.estimate.delta.reset();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto v = header_value(line, "model_hash"); !v.empty()) loaded.model_hash = v;
      if (auto v = header_value(line, "delta"); !v.empty() && v != "extrapolated")
        loaded.estimate.delta = std::stod(v);
      if (auto v = header_value(line, "coverage"); !v.empty())
        loaded.estimate.coverage = std::stol(v);
      continue;
    }
    std::istringstream row(line);
    double lo, hi;
    char comma;
    if (!(row >> lo >> comma >> hi)) throw IoError("malformed spectrum row: " + line);
    loaded.estimate.intervals.push_back({lo, hi});
  }
  if (loaded.model_hash.empty())
    throw IoError("spectrum artifact " + path + " carries no model hash");
  return loaded;
}

LoadedReference load_reference_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reference artifact " + path);
  LoadedReference loaded;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto v = header_value(line, "model_hash"); !v.empty()) loaded.model_hash = v;
      continue;
    }
    loaded.eigenvalues.push_back(std::stod(line));
  }
  if (loaded.model_hash.empty())
    throw IoError("reference artifact " + path + " carries no model hash");
  return loaded;
}

}  // namespace moire

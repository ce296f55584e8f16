#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/bloch.hpp"
#include "core/realspace.hpp"
#include "core/sweep.hpp"

namespace moire {

/// One config drives every subcommand, so comparisons are like-for-like by
/// construction. Parsed from a JSON file; see README for the schema.
struct RunConfig {
  int dim = 1;
  Eigen::MatrixXd a1, a2;

  // potentials, already reduced to coefficients
  std::vector<std::pair<FreqIndex, Cplx>> pot1, pot2;

  BasisSpec basis;
  SolverOptions solver;

  int kgrid_n = 4;
  std::vector<double> ladder{0.2, 0.1, 0.05, 0.025, 0.0125};
  double bands_delta = 0.0;  // 0 means "use the top of the ladder"

  // residual subcommand
  Eigen::VectorXd res_k_frac, res_kp_frac;
  int res_band = 1;  // 1-based
  double res_delta = 0.05;
  std::vector<double> res_radii{50.0, 400.0};
  int res_quad_ppu = 128;

  // reference oracle
  double ref_length = 100.0;
  double ref_spacing = 0.01;
  Boundary ref_boundary = Boundary::Dirichlet;
  int ref_m = 200;
  bool ref_window_relative = true;  // window relative to the reference minimum
  double ref_window_lo = -0.5;
  double ref_window_hi = 3.0;
  double ref_edge_margin = 0.05;
  double ref_edge_threshold = 0.5;
  std::size_t ref_max_dense_nodes = 4096;

  double compare_tolerance = 5e-2;

  int qmax = 100;
  double incommensurability_tol = 1e-9;

  std::string out_dir = "out";

  // provenance
  std::string canonical_json;    // normalized config echoed into artifacts
  std::string config_hash;       // hex, whole config
  std::string model_hash;        // hex, lattice + potentials only
  std::uint64_t seed = 0;        // derived from config_hash or MOIRE_SPECTRA_SEED
};

RunConfig parse_config_text(const std::string& json_text,
                            const std::string& base_dir = ".");
RunConfig parse_config_file(const std::string& path);

/// Built objects shared by the pipelines.
struct ModelObjects {
  ProductCell cell;
  std::shared_ptr<const FourierPotential> v1, v2;
};

ModelObjects build_model(const RunConfig& cfg);
SweepProblem build_sweep_problem(const RunConfig& cfg, int workers);
RealSpaceProblem build_realspace_problem(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& data);
std::string hash_hex(std::uint64_t h);

}  // namespace moire

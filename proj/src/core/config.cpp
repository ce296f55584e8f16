#include "core/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace moire {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

Eigen::MatrixXd parse_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) fail(name + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array()) fail(name + " rows must be arrays");
    if (r == 0) {
      cols = j[r].size();
      m.resize(rows, cols);
    }
    if (j[r].size() != cols) fail(name + " rows have inconsistent lengths");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) fail(name + " entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  if (rows != cols) fail(name + " must be square");
  return m;
}

std::vector<std::pair<FreqIndex, Cplx>> parse_potential(const json& j, int dim,
                                                        const std::string& name,
                                                        const std::string& base_dir) {
  std::vector<std::pair<FreqIndex, Cplx>> out;
  if (j.is_null()) return out;
  if (!j.is_object()) fail(name + " must be an object");

  if (j.contains("coefficients")) {
    for (const auto& entry : j.at("coefficients")) {
      // triple form: [[m...], re, im]
      if (!entry.is_array() || entry.size() != 3 || !entry[0].is_array())
        fail(name + ".coefficients entries must be [[m...], re, im]");
      if (static_cast<int>(entry[0].size()) != dim)
        fail(name + " coefficient index dimension does not match the lattice");
      FreqIndex idx{0, 0};
      for (int i = 0; i < dim; ++i) idx[i] = entry[0][i].get<int>();
      out.emplace_back(idx, Cplx(entry[1].get<double>(), entry[2].get<double>()));
    }
    return out;
  }

  if (j.contains("samples_file")) {
    const std::string rel = j.at("samples_file").get<std::string>();
    const std::string path =
        (!rel.empty() && rel.front() == '/') ? rel : base_dir + "/" + rel;
    if (!j.contains("radius")) fail(name + " sample ingestion needs a radius");
    const int radius = j.at("radius").get<int>();

    std::ifstream in(path);
    if (!in) fail(name + ": cannot open samples file " + path);
    std::vector<double> samples;
    double v;
    while (in >> v) samples.push_back(v);

    int n;
    if (j.contains("grid_points_per_axis")) {
      n = j.at("grid_points_per_axis").get<int>();
    } else if (dim == 1) {
      n = static_cast<int>(samples.size());
    } else {
      n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(samples.size()))));
    }

    // reduce to coefficients immediately: everything downstream sees indices
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dim, dim);  // placeholder lattice
    // from_samples needs the true lattice only for bookkeeping; indices and
    // amplitudes are lattice-independent, so a unit cell suffices here.
    FourierPotential tmp =
        FourierPotential::from_samples(Lattice(dim, a), samples, n, radius);
    for (const auto& [m, c] : tmp.coeffs()) out.emplace_back(m, c);
    return out;
  }

  if (j.empty()) return out;
  fail(name + " must contain either coefficients or samples_file");
  return out;
}

const json* find(const json& root, const char* key) {
  const auto it = root.find(key);
  return it == root.end() ? nullptr : &*it;
}

template <typename T>
void read_into(const json& block, const char* key, T& target) {
  if (const auto it = block.find(key); it != block.end()) target = it->get<T>();
}

}  // namespace

RunConfig parse_config_text(const std::string& json_text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("top level must be an object");

  RunConfig cfg;

  const json* lattice = find(root, "lattice");
  if (!lattice) fail("missing lattice block");
  if (!lattice->contains("A1") || !lattice->contains("A2"))
    fail("lattice block needs A1 and A2");
  cfg.a1 = parse_matrix(lattice->at("A1"), "lattice.A1");
  cfg.a2 = parse_matrix(lattice->at("A2"), "lattice.A2");
  if (cfg.a1.rows() != cfg.a2.rows()) fail("A1 and A2 must have the same dimension");
  cfg.dim = static_cast<int>(cfg.a1.rows());
  if (cfg.dim != 1 && cfg.dim != 2) fail("dimension must be 1 or 2");

  cfg.pot1 = parse_potential(root.value("potential1", json()), cfg.dim, "potential1", base_dir);
  cfg.pot2 = parse_potential(root.value("potential2", json()), cfg.dim, "potential2", base_dir);

  if (const json* basis = find(root, "basis")) {
    std::string mode = basis->value("mode", "box");
    if (mode == "box") {
      cfg.basis.kind = BasisSpec::Kind::Box;
      read_into(*basis, "radius1", cfg.basis.radius1);
      read_into(*basis, "radius2", cfg.basis.radius2);
      if (cfg.basis.radius1 < 0 || cfg.basis.radius2 < 0) fail("basis radii must be >= 0");
    } else if (mode == "energy_cut") {
      cfg.basis.kind = BasisSpec::Kind::EnergyCut;
      if (!basis->contains("ecut")) fail("energy_cut basis needs ecut");
      cfg.basis.ecut = basis->at("ecut").get<double>();
      if (!(cfg.basis.ecut > 0)) fail("ecut must be > 0");
    } else {
      fail("basis.mode must be box or energy_cut");
    }
  }

  if (const json* solver = find(root, "solver")) {
    read_into(*solver, "m", cfg.solver.m);
    read_into(*solver, "tol", cfg.solver.tol);
    read_into(*solver, "max_iter", cfg.solver.max_iter);
    std::size_t cap = cfg.solver.dense_cap;
    read_into(*solver, "dense_cap", cap);
    cfg.solver.dense_cap = cap;
    std::string path = "auto";
    read_into(*solver, "path", path);
    if (path == "auto")
      cfg.solver.path = SolvePath::Auto;
    else if (path == "dense")
      cfg.solver.path = SolvePath::Dense;
    else if (path == "iterative")
      cfg.solver.path = SolvePath::Iterative;
    else
      fail("solver.path must be auto, dense or iterative");
    if (cfg.solver.m < 1) fail("solver.m must be >= 1");
    if (!(cfg.solver.tol > 0)) fail("solver.tol must be > 0");
    if (cfg.solver.max_iter < 1) fail("solver.max_iter must be >= 1");
  }

  if (const json* sweep = find(root, "sweep")) {
    read_into(*sweep, "kgrid", cfg.kgrid_n);
    if (cfg.kgrid_n < 1) fail("sweep.kgrid must be >= 1");
    if (sweep->contains("ladder")) {
      cfg.ladder = sweep->at("ladder").get<std::vector<double>>();
      for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
        if (!(cfg.ladder[i] > 0)) fail("sweep.ladder entries must be > 0");
        if (i > 0 && !(cfg.ladder[i] < cfg.ladder[i - 1]))
          fail("sweep.ladder must be strictly descending");
      }
    }
    read_into(*sweep, "bands_delta", cfg.bands_delta);
    if (cfg.bands_delta < 0) fail("sweep.bands_delta must be > 0 when given");
  }

  cfg.res_k_frac = Eigen::VectorXd::Zero(cfg.dim);
  cfg.res_kp_frac = Eigen::VectorXd::Zero(cfg.dim);
  if (const json* res = find(root, "residual")) {
    auto read_frac = [&](const char* key, Eigen::VectorXd& target) {
      if (!res->contains(key)) return;
      const auto arr = res->at(key).get<std::vector<double>>();
      if (static_cast<int>(arr.size()) != cfg.dim) fail(std::string(key) + " has wrong dimension");
      for (int i = 0; i < cfg.dim; ++i) {
        if (arr[i] < 0.0 || arr[i] >= 1.0) fail(std::string(key) + " must lie in [0,1)");
        target[i] = arr[i];
      }
    };
    read_frac("k_frac", cfg.res_k_frac);
    read_frac("kp_frac", cfg.res_kp_frac);
    read_into(*res, "band", cfg.res_band);
    read_into(*res, "delta", cfg.res_delta);
    if (res->contains("radii")) cfg.res_radii = res->at("radii").get<std::vector<double>>();
    read_into(*res, "quad_points_per_unit", cfg.res_quad_ppu);
    if (cfg.res_band < 1) fail("residual.band must be >= 1 (1-based)");
    if (!(cfg.res_delta > 0)) fail("residual.delta must be > 0");
    for (double r : cfg.res_radii)
      if (!(r > 0)) fail("residual.radii must be > 0");
  }

  if (const json* ref = find(root, "reference")) {
    read_into(*ref, "L", cfg.ref_length);
    read_into(*ref, "h", cfg.ref_spacing);
    std::string boundary = "dirichlet";
    read_into(*ref, "boundary", boundary);
    if (boundary == "dirichlet")
      cfg.ref_boundary = Boundary::Dirichlet;
    else if (boundary == "periodic")
      cfg.ref_boundary = Boundary::Periodic;
    else
      fail("reference.boundary must be dirichlet or periodic");
    read_into(*ref, "m", cfg.ref_m);
    if (ref->contains("window_abs")) {
      const auto w = ref->at("window_abs").get<std::vector<double>>();
      if (w.size() != 2) fail("reference.window_abs must be [lo, hi]");
      cfg.ref_window_relative = false;
      cfg.ref_window_lo = w[0];
      cfg.ref_window_hi = w[1];
    } else if (ref->contains("window_rel")) {
      const auto w = ref->at("window_rel").get<std::vector<double>>();
      if (w.size() != 2) fail("reference.window_rel must be [lo, hi]");
      cfg.ref_window_relative = true;
      cfg.ref_window_lo = w[0];
      cfg.ref_window_hi = w[1];
    }
    read_into(*ref, "edge_margin_fraction", cfg.ref_edge_margin);
    read_into(*ref, "edge_mass_threshold", cfg.ref_edge_threshold);
    std::size_t cap = cfg.ref_max_dense_nodes;
    read_into(*ref, "max_dense_nodes", cap);
    cfg.ref_max_dense_nodes = cap;
    if (!(cfg.ref_length > 0) || !(cfg.ref_spacing > 0)) fail("reference needs L, h > 0");
    if (cfg.ref_m < 1) fail("reference.m must be >= 1");
    if (!(cfg.ref_window_lo < cfg.ref_window_hi)) fail("reference window is empty");
  }

  if (const json* cmp = find(root, "compare")) {
    read_into(*cmp, "tolerance", cfg.compare_tolerance);
    if (!(cfg.compare_tolerance > 0)) fail("compare.tolerance must be > 0");
  }

  if (const json* inc = find(root, "incommensurability")) {
    read_into(*inc, "qmax", cfg.qmax);
    read_into(*inc, "tol", cfg.incommensurability_tol);
    if (cfg.qmax < 1) fail("incommensurability.qmax must be >= 1");
    if (!(cfg.incommensurability_tol > 0)) fail("incommensurability.tol must be > 0");
  }

  if (const json* out = find(root, "output")) read_into(*out, "directory", cfg.out_dir);

  // normalized echo + hashes; nlohmann objects iterate in sorted key order,
  // so the dump is independent of the key order in the file
  cfg.canonical_json = root.dump(2);
  cfg.config_hash = hash_hex(fnv1a64(root.dump()));

  json model;
  model["lattice"] = root.at("lattice");
  model["potential1"] = root.value("potential1", json());
  model["potential2"] = root.value("potential2", json());
  cfg.model_hash = hash_hex(fnv1a64(model.dump()));

  cfg.seed = fnv1a64(cfg.config_hash);
  if (const char* env = std::getenv("MOIRE_SPECTRA_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (...) {
      fail("MOIRE_SPECTRA_SEED must be an unsigned integer");
    }
  }

  // construction-level validation (throws ConfigError on bad lattices)
  build_model(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string dir = ".";
  if (const auto slash = path.find_last_of('/'); slash != std::string::npos)
    dir = path.substr(0, slash);
  return parse_config_text(ss.str(), dir);
}

ModelObjects build_model(const RunConfig& cfg) {
  Lattice l1(cfg.dim, cfg.a1), l2(cfg.dim, cfg.a2);
  ProductCell cell(l1, l2);
  auto v1 = std::make_shared<FourierPotential>(l1, cfg.pot1);
  auto v2 = std::make_shared<FourierPotential>(l2, cfg.pot2);
  return ModelObjects{std::move(cell), std::move(v1), std::move(v2)};
}

SweepProblem build_sweep_problem(const RunConfig& cfg, int workers) {
  ModelObjects model = build_model(cfg);
  SweepProblem prob{std::move(model.cell), std::move(model.v1), std::move(model.v2),
                    cfg.basis, cfg.solver, cfg.seed, workers};
  return prob;
}

RealSpaceProblem build_realspace_problem(const RunConfig& cfg) {
  ModelObjects model = build_model(cfg);
  RealSpaceProblem p;
  p.dim = cfg.dim;
  p.length = cfg.ref_length;
  p.spacing = cfg.ref_spacing;
  p.boundary = cfg.ref_boundary;
  p.v1 = model.v1;
  p.v2 = model.v2;
  p.edge_margin_fraction = cfg.ref_edge_margin;
  p.edge_mass_threshold = cfg.ref_edge_threshold;
  p.max_dense_nodes = cfg.ref_max_dense_nodes;
  return p;
}

}  // namespace moire

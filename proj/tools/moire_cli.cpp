// Command-line front end. Links only the public C API.

#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "moire/moire.h"

namespace {

int map_exit_code(moire_status status) {
  switch (status) {
    case MOIRE_OK: return 0;
    case MOIRE_ERR_CONFIG: return 2;
    case MOIRE_ERR_SOLVER: return 3;
    case MOIRE_ERR_COMPARE: return 4;
    case MOIRE_ERR_IO: return 2;          // environment/config problem
    case MOIRE_ERR_INVALID_ARGUMENT: return 2;
    case MOIRE_ERR_INTERNAL: return 3;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moire: spectra of incommensurate bilayer Schrodinger operators via "
               "regularized Bloch fibers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int workers = 0;
  bool verbose = false;

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"check", "validate the config and report the incommensurability verdict"},
      {"bands", "band structure over the k-grid at fixed delta"},
      {"continuation", "delta ladder and extrapolation at the probe k-point"},
      {"spectrum", "extrapolated delta->0+ spectrum over the k-grid"},
      {"residual", "Bloch solution and residual certificate at the probe k-point"},
      {"reference", "real-space finite-difference oracle spectrum"},
      {"compare", "windowed Hausdorff distance of spectrum vs reference"},
  };

  for (const auto& [name, description] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "config file (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (default: config output.directory)");
    sub->add_option("--workers", workers, "worker threads, 0 = all cores");
    sub->add_flag("--verbose", verbose, "progress messages to stderr");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  moire_config* cfg = nullptr;
  moire_status status = moire_config_load(config_path.c_str(), &cfg);
  if (status != MOIRE_OK) {
    std::fprintf(stderr, "error: %s\n", moire_last_error());
    return map_exit_code(status);
  }

  status = moire_run(cfg, subcommand.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                     workers, verbose ? 1 : 0);
  if (status == MOIRE_OK && subcommand == "check") {
    char verdict[128];
    if (moire_check_verdict(cfg, verdict, sizeof verdict) == MOIRE_OK)
      std::printf("verdict: %s\n", verdict);
  }
  if (status != MOIRE_OK)
    std::fprintf(stderr, "error (%s): %s\n", moire_status_name(status), moire_last_error());

  moire_config_free(cfg);
  return map_exit_code(status);
}

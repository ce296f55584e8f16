#pragma once

#include <ostream>
#include <string>

#include "core/config.hpp"

namespace moire {

enum class RunStatus {
  Ok = 0,
  InvalidArgument = 1,
  ConfigProblem = 2,
  SolverFailure = 3,
  CompareFailure = 4,
  IoProblem = 5,
  InternalError = 6,
};

/// Runs one subcommand end to end: computes, writes artifacts under out_dir,
/// and reports a status plus a human-readable message. Never throws.
/// Subcommands: check, bands, continuation, spectrum, residual, reference,
/// compare.
RunStatus run_subcommand(const std::string& name, const RunConfig& cfg,
                         const std::string& out_dir, int workers, bool verbose,
                         std::ostream& log, std::string* message = nullptr);

}  // namespace moire

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "spectral_embed/manifold.hpp"
#include "spectral_embed/spectrum.hpp"
#include "spectral_embed_cli/run_config.hpp"

namespace spectral_embed::cli {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"spectrum", "embed", "verify", "constants", "charts"};
  return names;
}
inline const std::vector<std::string>& verify_targets() {
  static const std::vector<std::string> names{"varadhan",       "isometry", "injectivity", "truncation",
                                              "counterexample", "decay",    "growth"};
  return names;
}

/// Builds the configured manifold. A missing mesh file raises ConfigError.
ManifoldHandle make_manifold(const RunConfig& config);
/// Injectivity radius: bounds.iota when set, otherwise the known value of
/// the configured manifold.
double known_iota(const RunConfig& config, const ManifoldHandle& manifold);
GeometryBounds make_bounds(const RunConfig& config, const ManifoldHandle& manifold);

/// Runs one subcommand (target is used by `verify` only), writes its
/// artifacts under config.output_dir and returns the exit status. Progress
/// and the summary are echoed to `log`.
int run(const std::string& subcommand, const std::string& target, const RunConfig& config, std::ostream& log);

}  // namespace spectral_embed::cli

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectral_embed/report.hpp"

namespace spectral_embed::cli {

/// Raised for malformed configuration text; the message names the line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run depends on. Serialises to flat `key = value` text with
/// dotted section keys, and parses back to an equal value.
struct RunConfig {
  // manifold
  /// circle | sphere | flat_torus (analytic), icosphere | torus_mesh | mesh_file (meshes).
  std::string manifold_kind = "circle";
  /// Circle: L; sphere: R; flat torus / torus mesh: periods.
  std::vector<double> manifold_params{6.283185307179586};
  int manifold_resolution = 2048;
  int manifold_subdivisions = 4;
  std::vector<double> manifold_cells{64, 64};
  std::string manifold_mesh;
  std::string manifold_geodesics = "unfolded";

  // spectrum
  int spectrum_count = 401;
  int spectrum_export_functions = 0;

  // embed
  std::string embed_map = "G";
  double embed_t = 0.05;
  double embed_delta = 0.05;
  /// Highest eigen index used; -1 means spectrum_count - 1.
  int embed_truncation = -1;
  double embed_replicate_lambda = 0.0;
  bool embed_scan = false;
  double embed_t_max = 0.8;
  int embed_scan_steps = 8;
  double embed_h_near = 0.0;  // 0 selects the default
  double embed_h_far = 0.0;   // 0 selects the default
  int embed_max_sources = 512;

  // geometry bounds
  double bounds_kappa = 0.0;
  double bounds_iota = 0.0;   // 0: take from the manifold
  double bounds_volume = 0.0; // 0: take from the manifold
  double bounds_a = 0.0;      // 0: default a(n)
  double bounds_c = 0.0;      // 0: default C(n)
  double bounds_d = 0.0;      // 0: default D(n)
  std::optional<double> bounds_r_h;

  // verify
  double verify_t = 0.5;
  double verify_eps = 1e-6;
  std::vector<double> verify_distances{0.5, 1.0, 3.141592653589793};
  std::vector<double> verify_times{0.01, 0.03, 0.1, 0.3, 1.0};
  double verify_band = 0.15;
  int verify_samples = 20;
  double verify_margin_below = 1e-8;
  double verify_margin_above = 1e-3;
  double verify_tolerance = 0.05;
  double verify_continuous_t = 0.01;
  int verify_continuous_points = 10;

  // constants and coordinate experiments
  std::vector<double> constants_n{1, 2, 3};
  double constants_lambda = 1.0;
  double constants_iota = 1.0;
  double constants_r_min = 1e-8;
  double constants_r_max = 1e-2;
  int constants_r_steps = 13;
  bool constants_experiment = false;
  int constants_base = 0;
  double constants_radius = 0.0;  // 0: iota / 126
  std::vector<double> constants_lambdas{1.0};

  // charts
  double charts_half_width = 8.0;
  std::vector<double> charts_spacings{0.1, 0.05, 0.025};
  double charts_t_compare = 0.25;
  std::vector<double> charts_q_minus_one{0.02, 0.04, 0.08};
  std::string charts_bump = "gaussian";
  double charts_bump_width = 1.0;
  double charts_alpha = 0.5;
  double charts_sweep_spacing = 0.025;
  double charts_t_max = 1.0;
  int charts_steps = 1024;
  double charts_window_min = 0.0625;
  int charts_depth = 1;
  double charts_parametrix_q_minus_one = 0.05;
  double charts_parametrix_t = 0.5;
  double charts_parametrix_spacing = 0.05;
  int charts_parametrix_time_steps = 64;

  // run
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

/// Parses config text. Unknown keys, malformed values and duplicate keys
/// raise ConfigError with the line number.
RunConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
/// Reads and parses a config file; a missing file raises ConfigError.
RunConfig load_config(const std::string& path);
/// Every key in a fixed order, doubles in round-trip precision.
std::string serialize_config(const RunConfig& config);
/// The config as `config_<key>=value` report lines (dots become '_').
KeyValueReport config_report(const RunConfig& config);
/// All recognised keys, in serialisation order.
std::vector<std::string> config_keys();

}  // namespace spectral_embed::cli

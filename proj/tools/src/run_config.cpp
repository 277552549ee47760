#include "spectral_embed_cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <variant>

namespace spectral_embed::cli {

namespace {

using FieldRef = std::variant<double*, int*, bool*, std::string*, std::uint64_t*, std::vector<double>*,
                              std::optional<double>*>;

struct Field {
  const char* key;
  FieldRef ref;
};

std::vector<Field> fields(RunConfig& c) {
  return {
      {"manifold.kind", &c.manifold_kind},
      {"manifold.params", &c.manifold_params},
      {"manifold.resolution", &c.manifold_resolution},
      {"manifold.subdivisions", &c.manifold_subdivisions},
      {"manifold.cells", &c.manifold_cells},
      {"manifold.mesh", &c.manifold_mesh},
      {"manifold.geodesics", &c.manifold_geodesics},
      {"spectrum.count", &c.spectrum_count},
      {"spectrum.export_functions", &c.spectrum_export_functions},
      {"embed.map", &c.embed_map},
      {"embed.t", &c.embed_t},
      {"embed.delta", &c.embed_delta},
      {"embed.truncation", &c.embed_truncation},
      {"embed.replicate_lambda", &c.embed_replicate_lambda},
      {"embed.scan", &c.embed_scan},
      {"embed.t_max", &c.embed_t_max},
      {"embed.scan_steps", &c.embed_scan_steps},
      {"embed.h_near", &c.embed_h_near},
      {"embed.h_far", &c.embed_h_far},
      {"embed.max_sources", &c.embed_max_sources},
      {"bounds.kappa", &c.bounds_kappa},
      {"bounds.iota", &c.bounds_iota},
      {"bounds.volume", &c.bounds_volume},
      {"bounds.a", &c.bounds_a},
      {"bounds.c", &c.bounds_c},
      {"bounds.d", &c.bounds_d},
      {"bounds.r_h", &c.bounds_r_h},
      {"verify.t", &c.verify_t},
      {"verify.eps", &c.verify_eps},
      {"verify.distances", &c.verify_distances},
      {"verify.times", &c.verify_times},
      {"verify.band", &c.verify_band},
      {"verify.samples", &c.verify_samples},
      {"verify.margin_below", &c.verify_margin_below},
      {"verify.margin_above", &c.verify_margin_above},
      {"verify.tolerance", &c.verify_tolerance},
      {"verify.continuous_t", &c.verify_continuous_t},
      {"verify.continuous_points", &c.verify_continuous_points},
      {"constants.n", &c.constants_n},
      {"constants.lambda", &c.constants_lambda},
      {"constants.iota", &c.constants_iota},
      {"constants.r_min", &c.constants_r_min},
      {"constants.r_max", &c.constants_r_max},
      {"constants.r_steps", &c.constants_r_steps},
      {"constants.experiment", &c.constants_experiment},
      {"constants.base", &c.constants_base},
      {"constants.radius", &c.constants_radius},
      {"constants.lambdas", &c.constants_lambdas},
      {"charts.half_width", &c.charts_half_width},
      {"charts.spacings", &c.charts_spacings},
      {"charts.t_compare", &c.charts_t_compare},
      {"charts.q_minus_one", &c.charts_q_minus_one},
      {"charts.bump", &c.charts_bump},
      {"charts.bump_width", &c.charts_bump_width},
      {"charts.alpha", &c.charts_alpha},
      {"charts.sweep_spacing", &c.charts_sweep_spacing},
      {"charts.t_max", &c.charts_t_max},
      {"charts.steps", &c.charts_steps},
      {"charts.window_min", &c.charts_window_min},
      {"charts.depth", &c.charts_depth},
      {"charts.parametrix_q_minus_one", &c.charts_parametrix_q_minus_one},
      {"charts.parametrix_t", &c.charts_parametrix_t},
      {"charts.parametrix_spacing", &c.charts_parametrix_spacing},
      {"charts.parametrix_time_steps", &c.charts_parametrix_time_steps},
      {"seed", &c.seed},
      {"output.dir", &c.output_dir},
  };
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(const std::string& text, double& out) {
  // from_chars rejects a leading '+'; accept it for hand-written files.
  const std::string t = (!text.empty() && text[0] == '+') ? text.substr(1) : text;
  if (t == "inf" || t == "infinity") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  return parse_number(t, out);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::string value_text(const FieldRef& ref) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(*p);
        } else if constexpr (std::is_same_v<T, bool>) {
          return *p ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return *p;
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          return join(*p);
        } else if constexpr (std::is_same_v<T, std::optional<double>>) {
          return p->has_value() ? format_double(**p) : "none";
        } else {
          return std::to_string(*p);
        }
      },
      ref);
}

// Returns an error description, or empty on success.
std::string assign(const FieldRef& ref, const std::string& text) {
  return std::visit(
      [&text](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          return parse_double(text, *p) ? "" : "expected a number";
        } else if constexpr (std::is_same_v<T, bool>) {
          if (text == "true") *p = true;
          else if (text == "false") *p = false;
          else return "expected true or false";
          return "";
        } else if constexpr (std::is_same_v<T, std::string>) {
          *p = text;
          return "";
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          p->clear();
          if (text.empty()) return "";
          std::stringstream ss(text);
          std::string item;
          while (std::getline(ss, item, ',')) {
            double v = 0.0;
            if (!parse_double(trim(item), v)) return "expected a comma-separated list of numbers";
            p->push_back(v);
          }
          return "";
        } else if constexpr (std::is_same_v<T, std::optional<double>>) {
          if (text == "none" || text.empty()) {
            p->reset();
            return "";
          }
          double v = 0.0;
          if (!parse_double(text, v)) return "expected a number or none";
          *p = v;
          return "";
        } else {
          return parse_number(text, *p) ? "" : "expected an integer";
        }
      },
      ref);
}

}  // namespace

std::vector<std::string> config_keys() {
  RunConfig c;
  std::vector<std::string> keys;
  for (const auto& f : fields(c)) keys.emplace_back(f.key);
  return keys;
}

RunConfig parse_config(const std::string& text, const std::string& source_name) {
  RunConfig config;
  auto table = fields(config);
  std::set<std::string> seen;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(number) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = std::find_if(table.begin(), table.end(), [&key](const Field& f) { return key == f.key; });
    if (it == table.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    const std::string err = assign(it->ref, value);
    if (!err.empty()) throw ConfigError(where + "bad value for '" + key + "': " + err);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string serialize_config(const RunConfig& config) {
  RunConfig copy = config;
  std::string out;
  for (const auto& f : fields(copy)) {
    out += f.key;
    out += " = ";
    out += value_text(f.ref);
    out += '\n';
  }
  return out;
}

KeyValueReport config_report(const RunConfig& config) {
  RunConfig copy = config;
  KeyValueReport report;
  for (const auto& f : fields(copy)) {
    std::string key = std::string("config_") + f.key;
    std::replace(key.begin(), key.end(), '.', '_');
    std::string value = value_text(f.ref);
    // Summary values are never empty and never contain spaces around list separators.
    value.erase(std::remove(value.begin(), value.end(), ' '), value.end());
    report.add(key, value.empty() ? std::string("none") : value);
  }
  return report;
}

}  // namespace spectral_embed::cli

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "spectral_embed_cli/commands.hpp"
#include "spectral_embed_cli/run_config.hpp"

namespace fs = std::filesystem;
using namespace spectral_embed::cli;

namespace {

const std::string kCli = SPECTRAL_EMBED_CLI_PATH;
const std::string kConfigDir = SPECTRAL_EMBED_CONFIG_DIR;

int run_cli(const std::string& args) {
  const std::string command = "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path path = fs::current_path() / "cli_scratch" / name;
  fs::create_directories(path.parent_path());
  std::ofstream(path) << text;
  return path;
}

const char* kSmallCircle =
    "manifold.kind = circle\n"
    "manifold.params = 6.283185307179586\n"
    "manifold.resolution = 256\n"
    "spectrum.count = 101\n"
    "bounds.a = 9.869604401089358\n"
    "bounds.c = 1\n"
    "bounds.r_h = 1\n"
    "verify.samples = 5\n";

// Every file under dir, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return files;
}

}  // namespace

TEST_CASE("config text round-trips through serialize and parse") {
  RunConfig c;
  CHECK(parse_config(serialize_config(c), "defaults") == c);
  c.manifold_kind = "flat_torus";
  c.manifold_params = {1.5, 0.25};
  c.embed_scan = true;
  c.bounds_r_h = 0.75;
  c.seed = 123456789012345ull;
  c.verify_distances = {0.1, 1.0 / 3.0};
  c.output_dir = "some/dir";
  CHECK(parse_config(serialize_config(c), "modified") == c);
}

TEST_CASE("every shipped config parses and round-trips") {
  int count = 0;
  for (const auto& e : fs::directory_iterator(kConfigDir)) {
    if (e.path().extension() != ".cfg") continue;
    ++count;
    const RunConfig c = load_config(e.path().string());
    CHECK(parse_config(serialize_config(c), "copy") == c);
  }
  CHECK(count >= 10);
}

TEST_CASE("config errors carry the source and line") {
  CHECK_THROWS_WITH_AS(parse_config("seed = 1\n\nbogus.key = 2\n", "x.cfg"), doctest::Contains("x.cfg:3: unknown key"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("seed = 1\nseed = 2\n", "x.cfg"), doctest::Contains("x.cfg:2: duplicate key"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("embed.t = fast\n", "x.cfg"), doctest::Contains("x.cfg:1: bad value"), ConfigError);
  CHECK_THROWS_AS(parse_config("embed.scan = yes\n", "x.cfg"), ConfigError);
  CHECK_THROWS_AS(parse_config("spectrum.count = 1.5\n", "x.cfg"), ConfigError);
  CHECK_THROWS_AS(parse_config("no equals sign\n", "x.cfg"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("config parsing accepts comments, blank lines, lists and none") {
  const RunConfig c = parse_config(
      "# comment\n\n  embed.t = +0.25   # trailing\nverify.distances = 0.5, 1,3\nbounds.r_h = none\n"
      "constants.r_max = inf\n",
      "ok.cfg");
  CHECK(c.embed_t == 0.25);
  CHECK(c.verify_distances == std::vector<double>{0.5, 1.0, 3.0});
  CHECK_FALSE(c.bounds_r_h.has_value());
  CHECK(std::isinf(c.constants_r_max));
}

TEST_CASE("config report lines match the summary format") {
  const std::regex line_re("^[a-z0-9_]+=[^=]+$");
  RunConfig c;
  c.manifold_mesh = "";
  std::stringstream ss(config_report(c).str());
  std::string line;
  int lines = 0;
  while (std::getline(ss, line)) {
    CHECK_MESSAGE(std::regex_match(line, line_re), line);
    ++lines;
  }
  CHECK(lines == static_cast<int>(config_keys().size()));
}

TEST_CASE("exit codes") {
  CHECK(run_cli("") == kExitUsage);
  CHECK(run_cli("--help") == kExitPass);
  CHECK(run_cli("frobnicate") == kExitUsage);
  CHECK(run_cli("verify") == kExitUsage);
  CHECK(run_cli("verify nonsense") == kExitUsage);
  CHECK(run_cli("verify growth --config /nonexistent.cfg") == kExitUsage);

  const fs::path unknown = write_config("unknown.cfg", "no.such.key = 1\n");
  CHECK(run_cli("verify growth --config " + unknown.string()) == kExitUsage);
  const fs::path mesh = write_config("mesh.cfg", "manifold.kind = mesh_file\nmanifold.mesh = /missing.off\n");
  CHECK(run_cli("spectrum --config " + mesh.string() + " --out cli_scratch/mesh") == kExitUsage);
  const fs::path bad_off = write_config("bad.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  const fs::path open_mesh = write_config("open.cfg", "manifold.kind = mesh_file\nmanifold.mesh = " + bad_off.string() + "\n");
  CHECK(run_cli("spectrum --config " + open_mesh.string() + " --out cli_scratch/open") == kExitUsage);

  const fs::path ok = write_config("growth.cfg", kSmallCircle);
  CHECK(run_cli("verify growth --config " + ok.string() + " --out cli_scratch/growth") == kExitPass);
  const fs::path strict = write_config("strict.cfg", std::string(kSmallCircle) + "verify.tolerance = 1e-12\n");
  CHECK(run_cli("verify varadhan --config " + strict.string() + " --out cli_scratch/strict") == kExitFail);
}

TEST_CASE("outputs are byte-identical across runs and well formed") {
  const fs::path cfg = write_config("determinism.cfg", kSmallCircle);
  // Same config, same output directory: every file must be reproduced exactly.
  fs::remove_all("cli_scratch/run_a");
  REQUIRE(run_cli("verify truncation --config " + cfg.string() + " --out cli_scratch/run_a") == kExitPass);
  const auto a = snapshot("cli_scratch/run_a");
  fs::remove_all("cli_scratch/run_a");
  REQUIRE(run_cli("verify truncation --config " + cfg.string() + " --out cli_scratch/run_a") == kExitPass);
  const auto b = snapshot("cli_scratch/run_a");
  REQUIRE(a.size() == b.size());
  CHECK(a.size() >= 4);
  for (const auto& [file, content] : a) CHECK_MESSAGE(b.at(file) == content, file);

  // The recorded config re-parses to the effective one.
  RunConfig effective = load_config(cfg.string());
  effective.output_dir = "cli_scratch/run_a";
  CHECK(load_config("cli_scratch/run_a/run_config.cfg") == effective);

  const std::regex line_re("^[a-z0-9_]+=[^=]+$");
  const std::regex header_re("^[A-Za-z_][A-Za-z0-9_]*(,[A-Za-z_][A-Za-z0-9_]*)*$");
  for (const auto& [file, content] : a) {
    std::stringstream ss(content);
    std::string line;
    if (file.ends_with(".txt")) {
      while (std::getline(ss, line)) CHECK_MESSAGE(std::regex_match(line, line_re), (file + ": " + line));
    } else if (file.ends_with(".csv")) {
      REQUIRE(std::getline(ss, line));
      CHECK_MESSAGE(std::regex_match(line, header_re), (file + ": " + line));
    }
  }
}

TEST_CASE("the seed changes only the sampled pairs") {
  const fs::path cfg = write_config("seeded.cfg", kSmallCircle);
  REQUIRE(run_cli("verify truncation --config " + cfg.string() + " --out cli_scratch/seed1 --seed 1") == kExitPass);
  REQUIRE(run_cli("verify truncation --config " + cfg.string() + " --out cli_scratch/seed2 --seed 2") == kExitPass);
  CHECK(read_file("cli_scratch/seed1/truncation_pairs.csv") != read_file("cli_scratch/seed2/truncation_pairs.csv"));
  CHECK(read_file("cli_scratch/seed1/truncation_tail.csv") == read_file("cli_scratch/seed2/truncation_tail.csv"));
}

TEST_CASE("every subcommand runs in process on small inputs") {
  RunConfig c = parse_config(kSmallCircle, "small");
  std::stringstream log;

  c.output_dir = "cli_scratch/spectrum";
  c.spectrum_export_functions = 2;
  CHECK(run("spectrum", "", c, log) == kExitPass);
  CHECK(fs::exists("cli_scratch/spectrum/eigenfunction_1.csv"));

  c.output_dir = "cli_scratch/embed";
  c.embed_map = "G";
  c.embed_delta = 0.2;
  c.embed_t = 0.3;
  CHECK(run("embed", "", c, log) == kExitPass);
  const std::string summary = read_file("cli_scratch/embed/summary.txt");
  CHECK(summary.find("\nn=100\n") != std::string::npos);
  CHECK(summary.find("\nn_0=") != std::string::npos);
  CHECK(summary.find("\ndil_min=") != std::string::npos);

  c.output_dir = "cli_scratch/constants";
  c.constants_n = {2};
  c.constants_r_steps = 3;
  CHECK(run("constants", "", c, log) == kExitPass);

  c.output_dir = "cli_scratch/decay";
  c.verify_distances = {0.5, 3.141592653589793};
  c.verify_times = {0.01, 0.1, 1.0};
  CHECK(run("verify", "decay", c, log) == kExitPass);

  CHECK_THROWS_AS(run("verify", "bogus", c, log), ConfigError);
  c.manifold_kind = "klein_bottle";
  CHECK_THROWS_AS(make_manifold(c), ConfigError);
}

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spectral_embed/error.hpp"
#include "spectral_embed_cli/commands.hpp"
#include "spectral_embed_cli/run_config.hpp"

namespace cli = spectral_embed::cli;

namespace {

std::string describe(const std::string& name) {
  if (name == "spectrum") return "Compute eigenpairs and eigenfunction sup-norm ratios";
  if (name == "embed") return "Build an embedding map and report its dilatation";
  if (name == "verify") return "Run one numerical check (exit 1 on failure)";
  if (name == "constants") return "Tabulate radius constants, optionally run the coordinate experiment";
  if (name == "charts") return "Study heat-kernel charts on a flat model";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-kernel and eigenfunction embeddings of closed manifolds", "spectral-embed"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool scan = false;
  std::string target;

  for (const std::string& name : cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", config_path, "Configuration file (key = value lines)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Seed for sampling verification pairs (overrides seed)");
    sub->add_flag("--scan", scan, "Scan t over the geometric grid embed.t_max * 2^-j");
    if (name == "verify") {
      sub->add_option("target", target, "Check to run")->required()->check(CLI::IsMember(cli::verify_targets()));
    }
  }
  if (argc <= 1) {
    std::cerr << app.help();
    return cli::kExitUsage;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return cli::kExitUsage;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    cli::RunConfig config = config_path.empty() ? cli::RunConfig{} : cli::load_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (seed) config.seed = *seed;
    if (scan) config.embed_scan = true;
    const int status = cli::run(subcommand, target, config, std::cout);
    if (status != cli::kExitPass) std::cerr << subcommand << (target.empty() ? "" : " " + target) << ": FAIL\n";
    return status;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const spectral_embed::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const spectral_embed::MeshError& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitFail;
  }
}

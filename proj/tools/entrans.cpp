#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entrans/commands.hpp"
#include "entrans/config.hpp"
#include "entrans/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"entrans: maximum entropy densities, parallel transport and Fokker-Planck witnesses"};
  app.require_subcommand(1);

  std::string configPath;
  std::string outputDir;
  int threads = 1;
  std::optional<std::uint64_t> seed;

  for (const char* name : {"fit", "transport", "evolve", "sample", "certify", "contour"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", configPath, "config file")->required();
    sub->add_option("--output", outputDir, "output directory (overrides config and OUTPUT_DIR)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "random seed (overrides config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : entrans::kExitConfig;
  }

  entrans::RunConfig cfg;
  try {
    cfg = entrans::loadConfig(configPath);
  } catch (const entrans::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return entrans::kExitConfig;
  }
  if (const char* env = std::getenv("OUTPUT_DIR"); env && *env) cfg.outputDir = env;
  if (!outputDir.empty()) cfg.outputDir = outputDir;
  if (seed) cfg.seed = *seed;
  entrans::setThreadCount(threads);

  return entrans::runCommand(app.get_subcommands().front()->get_name(), cfg, std::cout, std::cerr);
}

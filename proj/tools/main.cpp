#include "topobus/config.hpp"
#include "topobus/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format;
  long long seed = -1;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Majorana-wire / flux-qubit quantum bus simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("topobus ") + topobus::cli::kToolVersion);

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"wire-spectrum", "Bogoliubov-de Gennes spectrum of the nanowire"},
      {"phase-diagram", "topological phase scan over (mu, V_x)"},
      {"majorana-splitting", "zero-mode splitting vs wire length"},
      {"flux-potential", "Josephson potential landscape raster"},
      {"flux-splitting", "flux-qubit splitting vs gate charge, both parities"},
      {"entangle", "joint-parity entanglement of a T-C pair (JSON trace)"},
      {"teleport", "measurement-based teleportation run (JSON trace)"},
      {"bell-stats", "Bell-outcome histogram over many shots"},
  };

  CommonOptions opts;
  for (const auto& [name, description] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", opts.config_path, "config file (key = value sections)")
        ->required();
    sub->add_option("--out", opts.out_path, "output path (default <subcommand>.<ext>)");
    sub->add_option("--seed", opts.seed, "RNG seed, overrides [run] seed");
    sub->add_option("--format", opts.format, "csv or json, overrides [run] format")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  std::ifstream in(opts.config_path);
  if (!in) {
    std::cerr << "validation error: cannot read config file '" << opts.config_path << "'\n";
    return 1;
  }
  std::ostringstream text;
  text << in.rdbuf();

  topobus::cli::RunConfig cfg;
  try {
    cfg = topobus::cli::parse_config(text.str());
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  }

  if (!opts.out_path.empty()) cfg.out_path = opts.out_path;
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.format == "csv") cfg.format = topobus::cli::OutputFormat::csv;
  if (opts.format == "json") cfg.format = topobus::cli::OutputFormat::json;

  return topobus::cli::run(subcommand, cfg, std::cerr);
}

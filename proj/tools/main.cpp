#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "app/commands.hpp"
#include "app/run_config.hpp"
#include "radtrans/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Stationary radiative transfer and temperature balance solver"};
  cli.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = cli.add_subcommand("run", "Solve the problem described by a config file");
  run->add_option("--config", config_path, "key = value configuration file")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config's out key)");

  auto* check = cli.add_subcommand("check", "Run the invariant suite");

  std::string sizes = "16,32,64";
  auto* bench = cli.add_subcommand("bench", "Time convolution against the ray-marching oracle");
  bench->add_option("--sizes", sizes, "comma-separated grid sizes");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : radtrans::app::kExitConfigError;
  }

  radtrans::apply_thread_limit_from_env();

  try {
    if (run->parsed()) {
      std::optional<std::filesystem::path> out;
      if (!out_dir.empty()) out = out_dir;
      return radtrans::app::run_command(config_path, out, std::cout, std::cerr);
    }
    if (check->parsed()) return radtrans::app::check_command(std::cout);
    if (bench->parsed()) {
      return radtrans::app::bench_command(radtrans::app::parse_sizes(sizes), std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return radtrans::app::kExitConfigError;
  }
  return radtrans::app::kExitConfigError;
}

#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dsheat/app/commands.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config, "experiment config (JSON)")->required();
  sub->add_option("--out", flags.out, "output directory (overrides output.dir)");
  sub->add_option("--seed", flags.seed, "seed override for random initial data");
  sub->add_option("--steps", flags.steps, "step count override");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dsheat::app;
  CLI::App app{"Discrete semilinear heat equation: simulation, blow-up detection and "
               "small-data certificates"};
  app.require_subcommand(1);

  using Command = std::function<int(const ExperimentConfig&, const fs::path&)>;
  CommonFlags flags;
  Command chosen;
  auto add = [&](const char* name, const char* help, Command cmd) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    sub->callback([&chosen, cmd] { chosen = cmd; });
  };
  add("simulate", "iterate the nonlinear lattice dynamics and detect blow-up", cmd_simulate);
  add("verify", "check the majorant comparison against the simulation", cmd_verify);
  add("bound", "evaluate the small-data series bound for the initial data", cmd_bound);
  add("threshold", "bisect the blow-up amplitude of the initial profile", cmd_threshold);
  add("sweep", "run a parameter grid and write one CSV row per point", cmd_sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(flags.config);
    if (flags.seed) cfg.init.seed = *flags.seed;
    if (flags.steps) cfg.steps = *flags.steps;
    const fs::path out = flags.out ? fs::path(*flags.out) : fs::path(cfg.output_dir);
    return chosen(cfg, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitError;
}

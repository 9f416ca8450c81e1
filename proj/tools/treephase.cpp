#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "treephase/error.hpp"
#include "treephase/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

int fail(int code, const std::string& message) {
  std::cerr << "treephase: " << message << "\n";
  return code;
}

bool is_config_error(treephase::ErrorCode c) {
  using treephase::ErrorCode;
  return c == ErrorCode::ConfigNotFound || c == ErrorCode::SchemaViolation || c == ErrorCode::EmptyGrid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree-indexed random walks, Gaussian and Bernoulli actions: experiment runner"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  std::string config_path;
  int rank = 2;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "worker cap; outputs do not depend on it")->check(CLI::Range(1u, 1024u));
    sub->add_option("--out", out, "output prefix; writes <prefix>.csv and <prefix>.json");
  };
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "tabulate a phase diagram over a parameter grid");
  add_common(sweep);
  CLI::App* constants = app.add_subcommand("print-constants", "exact constants for the free group F_d");
  constants->add_option("--d", rank, "rank d >= 2")->required()->check(CLI::Range(2, 1 << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (constants->parsed()) {
      std::cout << treephase::cli::print_constants(rank);
      return 0;
    }
    const bool is_sweep = sweep->parsed();
    treephase::cli::ExperimentConfig config = treephase::cli::load_config(config_path, !is_sweep);
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    if (!out.empty()) config.output = out;
    const treephase::cli::Table table =
        is_sweep ? treephase::cli::sweep_phase_diagram(config) : treephase::cli::run_experiment(config);
    treephase::cli::write_artifacts(config.output, table, config);
    std::cout << config.output << ".csv\n" << config.output << ".json\n";
    return 0;
  } catch (const treephase::Error& e) {
    return fail(is_config_error(e.code()) ? kConfigError : kRuntimeError, e.what());
  } catch (const std::exception& e) {
    return fail(kRuntimeError, std::string("RuntimeFailure: ") + e.what());
  }
}

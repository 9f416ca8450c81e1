#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace treephase::cli {

using Json = nlohmann::json;

/// One experiment, loaded from a JSON document. `document` keeps every key so
/// the per-experiment readers can validate what they need.
struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output;      // path prefix; ".csv" and ".json" are appended
  std::string base_dir;    // directory of the config file, for relative edge lists
  Json document;

  /// FNV-1a 64 of the canonical dump, without "threads" and "output" so neither
  /// changes the provenance line.
  std::string hash() const;
};

inline const std::vector<std::string> kExperimentKinds = {
    "growth_profile", "mc_slope_sweep", "dirichlet", "speed",
    "spectra",        "bernoulli_sweep", "translation", "verify_gaussian"};

/// Throws ConfigNotFound or SchemaViolation. `require_kind` is false for the
/// phase-diagram sweep, whose documents need no "experiment" key.
ExperimentConfig load_config(const std::string& path, bool require_kind = true);
ExperimentConfig parse_config(std::string_view text, std::string base_dir = ".", bool require_kind = true);

std::string fnv1a_hex(std::string_view bytes);

using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string>;

/// Long-format table; serializes to CSV and to a JSON mirror of the same rows.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  Json extras = Json::object();  // summary values that are not rows (JSON only)

  std::string to_csv(const std::string& config_hash, std::uint64_t seed) const;
  std::string to_json(const std::string& config_hash, std::uint64_t seed) const;
};

/// Column contract of the walk-style experiments (growth_profile, speed, dirichlet,
/// bernoulli_sweep, translation, verify_gaussian). `param` and `label` trail the
/// fixed prefix: the swept parameter and a categorical result where one exists.
inline const std::vector<std::string> kLongColumns = {"spec",  "dist",   "n",     "trials", "seed",
                                                      "statistic", "value", "stderr", "param",  "label"};
/// Column contract of spectral curves; `curve` is growth_rate (axis s),
/// spectral_radius (axis t) or kesten_b (axis x).
inline const std::vector<std::string> kSpectraColumns = {"d", "t_or_s", "exact", "dp_n", "dp_value", "curve",
                                                         "dp_spread"};
/// Column contract of slope sweeps.
inline const std::vector<std::string> kSlopeColumns = {"model",  "spec", "param", "depth", "trials",
                                                       "seed",   "slope", "ci_lo", "ci_hi", "classification"};
/// Column contract of phase diagrams.
inline const std::vector<std::string> kPhaseColumns = {
    "model", "spec",   "delta", "param",  "regime", "lambda",         "provenance",    "critical_low",
    "critical_high", "depth", "trials", "seed", "slope", "ci_lo", "ci_hi", "classification"};

Table run_experiment(const ExperimentConfig& config);

/// Exact regime per grid point, optional Monte Carlo slope columns, and the
/// critical lines. Throws EmptyGrid.
Table sweep_phase_diagram(const ExperimentConfig& config);

/// "key = value" lines for F_d and its Cayley tree.
std::string print_constants(int d);

/// Writes prefix.csv and prefix.json, creating parent directories.
void write_artifacts(const std::string& prefix, const Table& table, const ExperimentConfig& config);

}  // namespace treephase::cli

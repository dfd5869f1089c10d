#pragma once

// Deterministic experiment grids over (theta, lambda, N) at fixed depth.
//
// Results CSV (header mandatory, columns in this order):
//   theta,lambda,shots,depth,trials,strict_acc,wilson_hw,perpos_acc_json,cell_seed,wall_ms
// Rows follow grid-index order (theta outermost, then lambda, then shots).
// perpos_acc_json is a quoted JSON array. A run that stops early ends with the
// line "# INCOMPLETE". Doubles use the shortest round-trip form.
//
// Sidecar JSON (<output stem>.json): {"config": <SweepConfig>, "run":
// {"rows": n, "complete": bool, "csv": "<file name>"}}.

#include <atomic>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "probeleak/decode.hpp"
#include "probeleak/errors.hpp"

namespace probeleak {

inline constexpr int kSweepSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultMasterSeed = 24301;  // 0x5EED
inline constexpr std::uint64_t kDefaultTrials = 200;

struct SweepConfig {
  std::size_t depth = 2;
  std::vector<double> theta_grid;
  std::vector<double> lambda_grid;
  std::vector<std::uint64_t> shots_grid;
  std::uint64_t trials = kDefaultTrials;
  std::uint64_t master_seed = kDefaultMasterSeed;
  Decoder decoder = Decoder::ML;
  StepOrder order = StepOrder::GateNoiseCoupleMeasure;
  std::string output;  // CSV path; empty means in-memory only
  std::size_t threads = 0;
  // Record per-cell wall time. Off by default so output files are a pure
  // function of the config; when off, wall_ms is written as 0.
  bool record_timing = false;

  // Throws InputError / CapacityError on any invalid field.
  void validate() const;
  [[nodiscard]] std::size_t cell_count() const {
    return theta_grid.size() * lambda_grid.size() * shots_grid.size();
  }
};

// Parses a config JSON document. Requires "schema_version": 1 and rejects
// unknown fields. Grids are arrays or {"start", "stop", "count"} objects
// (shots_grid arrays only).
SweepConfig sweep_config_from_json(std::string_view text);
std::string sweep_config_to_json(const SweepConfig& config);

struct CellResult {
  double theta;
  double lambda;
  std::uint64_t shots;
  std::size_t depth;
  std::uint64_t trials;
  double strict_accuracy;
  std::vector<double> per_position_accuracy;
  double wilson_halfwidth;
  std::uint64_t cell_seed;
  double wall_ms;

  friend bool operator==(const CellResult&, const CellResult&) = default;
};

// derive_seed(master_seed, {theta_index, lambda_index, shots_index}).
std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t theta_index,
                        std::size_t lambda_index, std::size_t shots_index);

class Interrupted : public Error {
 public:
  using Error::Error;
};

struct SweepRunOptions {
  // When set and raised, workers stop after their current column, the
  // partial CSV is closed with the incomplete marker, and Interrupted is
  // thrown.
  const std::atomic<bool>* cancel = nullptr;
};

std::vector<CellResult> run_sweep(const SweepConfig& config, const SweepRunOptions& options = {});

std::string results_csv_header();
std::string results_csv_row(const CellResult& cell);
std::string sidecar_path(const std::string& csv_path);

struct ResultsFile {
  std::vector<CellResult> cells;
  bool complete;
};

ResultsFile parse_results_csv(std::string_view text);

struct RidgePoint {
  double theta;
  double accuracy;
};

// Argmax over theta of strict accuracy among cells with exactly this lambda
// and shot count; ties go to the smaller theta. InputError if none match.
RidgePoint ridge_extract(const std::vector<CellResult>& results, double lambda,
                         std::uint64_t shots);

}  // namespace probeleak

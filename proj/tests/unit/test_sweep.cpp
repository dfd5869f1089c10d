#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>

#include "json.hpp"
#include "probeleak/errors.hpp"
#include "probeleak/serialize.hpp"
#include "probeleak/sweep.hpp"

using namespace probeleak;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "probeleak_sweep_test";
  fs::create_directories(dir);
  return dir / name;
}

SweepConfig small_config() {
  SweepConfig c;
  c.depth = 2;
  c.theta_grid = {0.0, 1.0, 2.5};
  c.lambda_grid = {0.0, 0.2};
  c.shots_grid = {8, 64};
  c.trials = 30;
  c.master_seed = 17;
  return c;
}

CellResult cell(double theta, double acc, double lambda = 0, std::uint64_t shots = 10) {
  return CellResult{theta, lambda, shots, 2, 10, acc, {acc, acc}, 0.1, 0, 0};
}

}  // namespace

TEST(SweepConfig, ParsesArraysAndRanges) {
  const auto c = sweep_config_from_json(R"({
    "schema_version": 1, "depth": 3,
    "theta_grid": {"start": 0, "stop": 6.283185307179586, "count": 33},
    "lambda_grid": [0, 0.05, 0.1],
    "shots_grid": [32, 64],
    "trials": 50, "master_seed": 7, "decoder": "perpos", "order": "gcmn",
    "output": "out.csv", "threads": 2, "record_timing": true})");
  EXPECT_EQ(c.depth, 3u);
  ASSERT_EQ(c.theta_grid.size(), 33u);
  EXPECT_EQ(c.theta_grid.front(), 0.0);
  EXPECT_EQ(c.theta_grid.back(), 2 * kPi);
  EXPECT_EQ(c.lambda_grid.size(), 3u);
  EXPECT_EQ(c.trials, 50u);
  EXPECT_EQ(c.decoder, Decoder::PerPosition);
  EXPECT_EQ(c.order, StepOrder::GateCoupleMeasureNoise);
  EXPECT_TRUE(c.record_timing);
  EXPECT_EQ(c.cell_count(), 33u * 3 * 2);
}

TEST(SweepConfig, Defaults) {
  const auto c = sweep_config_from_json(
      R"({"schema_version": 1, "depth": 2, "theta_grid": [1], "lambda_grid": [0], "shots_grid": [4]})");
  EXPECT_EQ(c.trials, 200u);
  EXPECT_EQ(c.master_seed, 24301u);
  EXPECT_EQ(c.decoder, Decoder::ML);
  EXPECT_EQ(c.order, StepOrder::GateNoiseCoupleMeasure);
  EXPECT_FALSE(c.record_timing);
}

TEST(SweepConfig, Rejections) {
  const std::string base = R"("depth": 2, "theta_grid": [1], "lambda_grid": [0], "shots_grid": [4])";
  EXPECT_THROW(sweep_config_from_json("{" + base + "}"), InputError);
  EXPECT_THROW(sweep_config_from_json(R"({"schema_version": 2, )" + base + "}"), InputError);
  EXPECT_THROW(sweep_config_from_json(R"({"schema_version": 1, "colour": 3, )" + base + "}"), InputError);
  EXPECT_THROW(sweep_config_from_json(R"({"schema_version": 1})"), InputError);
  EXPECT_THROW(sweep_config_from_json("not json"), InputError);
  EXPECT_THROW(sweep_config_from_json(
                   R"({"schema_version": 1, "depth": 2, "theta_grid": [], "lambda_grid": [0], "shots_grid": [4]})"),
               InputError);
  EXPECT_THROW(sweep_config_from_json(
                   R"({"schema_version": 1, "depth": 2, "theta_grid": [1], "lambda_grid": [1.5], "shots_grid": [4]})"),
               InputError);
  EXPECT_THROW(sweep_config_from_json(
                   R"({"schema_version": 1, "depth": 2, "theta_grid": [1], "lambda_grid": [0], "shots_grid": [0]})"),
               InputError);
  EXPECT_THROW(sweep_config_from_json(
                   R"({"schema_version": 1, "depth": 10, "theta_grid": [1], "lambda_grid": [0], "shots_grid": [4]})"),
               CapacityError);
  EXPECT_THROW(sweep_config_from_json(
                   R"({"schema_version": 1, "depth": 2, "theta_grid": {"start": 0, "stop": 1}, "lambda_grid": [0], "shots_grid": [4]})"),
               InputError);
  EXPECT_THROW(sweep_config_from_json(R"({"schema_version": 1, "depth": "two", "theta_grid": [1], "lambda_grid": [0], "shots_grid": [4]})"),
               InputError);
}

TEST(SweepConfig, JsonRoundTrip) {
  auto c = small_config();
  c.decoder = Decoder::PerPosition;
  c.output = "x.csv";
  const auto d = sweep_config_from_json(sweep_config_to_json(c));
  EXPECT_EQ(d.theta_grid, c.theta_grid);
  EXPECT_EQ(d.lambda_grid, c.lambda_grid);
  EXPECT_EQ(d.shots_grid, c.shots_grid);
  EXPECT_EQ(d.decoder, c.decoder);
  EXPECT_EQ(d.output, c.output);
  EXPECT_EQ(d.master_seed, c.master_seed);
}

TEST(RunSweep, OneResultPerCellInCanonicalOrder) {
  SweepConfig c;
  c.depth = 1;
  c.theta_grid.resize(33);
  for (std::size_t i = 0; i < 33; ++i) c.theta_grid[i] = 2 * kPi * i / 32;
  c.lambda_grid = {0, 0.05, 0.1, 0.2, 1};
  c.shots_grid = {32, 64, 128, 256};
  c.trials = 5;
  const auto r = run_sweep(c);
  ASSERT_EQ(r.size(), 660u);
  std::size_t i = 0;
  for (std::size_t it = 0; it < 33; ++it)
    for (std::size_t il = 0; il < 5; ++il)
      for (std::size_t in = 0; in < 4; ++in, ++i) {
        EXPECT_EQ(r[i].theta, c.theta_grid[it]);
        EXPECT_EQ(r[i].lambda, c.lambda_grid[il]);
        EXPECT_EQ(r[i].shots, c.shots_grid[in]);
        EXPECT_EQ(r[i].cell_seed, cell_seed(c.master_seed, it, il, in));
        EXPECT_EQ(r[i].wall_ms, 0.0);
      }
}

TEST(RunSweep, CellsMatchStandaloneEvaluation) {
  const auto c = small_config();
  const auto r = run_sweep(c);
  std::size_t i = 0;
  for (std::size_t it = 0; it < 3; ++it)
    for (std::size_t il = 0; il < 2; ++il)
      for (std::size_t in = 0; in < 2; ++in, ++i) {
        const auto rep = evaluate_accuracy({c.depth, c.theta_grid[it], c.lambda_grid[il], c.shots_grid[in],
                                            c.trials, cell_seed(c.master_seed, it, il, in)});
        EXPECT_EQ(r[i].strict_accuracy, rep.strict_accuracy);
        EXPECT_EQ(r[i].per_position_accuracy, rep.per_position_accuracy);
        EXPECT_EQ(r[i].wilson_halfwidth, rep.wilson_halfwidth);
      }
}

TEST(RunSweep, ByteIdenticalAcrossRunsAndThreadCounts) {
  auto c = small_config();
  c.decoder = Decoder::PerPosition;
  std::string first;
  for (std::size_t threads : {1, 2, 5, 0}) {
    c.threads = threads;
    c.output = scratch("det_" + std::to_string(threads) + ".csv").string();
    run_sweep(c);
    const auto text = read_file(c.output);
    if (first.empty()) first = text;
    EXPECT_EQ(text, first) << "threads=" << threads;
  }
}

TEST(RunSweep, WritesCsvAndSidecar) {
  auto c = small_config();
  c.output = scratch("out.csv").string();
  const auto r = run_sweep(c);
  const auto text = read_file(c.output);
  EXPECT_EQ(text.substr(0, text.find('\n') + 1), results_csv_header());
  const auto parsed = parse_results_csv(text);
  EXPECT_TRUE(parsed.complete);
  EXPECT_EQ(parsed.cells, r);
  const auto side = nlohmann::json::parse(read_file(sidecar_path(c.output)));
  EXPECT_EQ(side["run"]["rows"], r.size());
  EXPECT_EQ(side["run"]["complete"], true);
  EXPECT_EQ(side["run"]["csv"], "out.csv");
  EXPECT_EQ(side["config"]["master_seed"], 17);
  EXPECT_EQ(side["config"]["schema_version"], 1);
}

TEST(RunSweep, CancelledRunIsFlaggedIncomplete) {
  auto c = small_config();
  c.output = scratch("cancel.csv").string();
  std::atomic<bool> cancel{true};
  EXPECT_THROW(run_sweep(c, SweepRunOptions{&cancel}), Interrupted);
  const auto text = read_file(c.output);
  EXPECT_NE(text.find("# INCOMPLETE"), std::string::npos);
  EXPECT_FALSE(parse_results_csv(text).complete);
  const auto side = nlohmann::json::parse(read_file(sidecar_path(c.output)));
  EXPECT_EQ(side["run"]["complete"], false);
}

TEST(RunSweep, CapacityFailsBeforeAnyOutput) {
  auto c = small_config();
  c.depth = 10;
  c.output = scratch("cap.csv").string();
  fs::remove(c.output);
  EXPECT_THROW(run_sweep(c), CapacityError);
  EXPECT_FALSE(fs::exists(c.output));
}

TEST(RunSweep, DecouplingCellAtChance) {
  SweepConfig c;
  c.depth = 3;
  c.theta_grid = {0};
  c.lambda_grid = {0};
  c.shots_grid = {256};
  const auto r = run_sweep(c);
  ASSERT_EQ(r.size(), 1u);
  const auto w = wilson_interval(static_cast<std::uint64_t>(std::lround(r[0].strict_accuracy * r[0].trials)),
                                 r[0].trials);
  EXPECT_TRUE(w.contains(1.0 / 27)) << r[0].strict_accuracy;
}

TEST(ResultsCsv, RowFormat) {
  CellResult c{0.5, 0.05, 64, 2, 10, 0.3, {0.5, 0.25}, 0.125, 42, 0};
  EXPECT_EQ(results_csv_row(c), "0.5,0.05,64,2,10,0.3,0.125,\"[0.5,0.25]\",42,0\n");
  EXPECT_EQ(results_csv_header(),
            "theta,lambda,shots,depth,trials,strict_acc,wilson_hw,perpos_acc_json,cell_seed,wall_ms\n");
}

TEST(ResultsCsv, Rejections) {
  EXPECT_THROW(parse_results_csv("a,b\n"), InputError);
  EXPECT_THROW(parse_results_csv(results_csv_header() + "1,2,3\n"), InputError);
  EXPECT_THROW(parse_results_csv(results_csv_header() + "x,0,1,1,1,0,0,\"[0]\",1,0\n"), InputError);
  EXPECT_THROW(parse_results_csv(results_csv_header() + "1,0,1,1,1,0,0,\"[oops\",1,0\n"), InputError);
}

TEST(SidecarPath, ReplacesExtension) {
  EXPECT_EQ(sidecar_path("a/b/run.csv"), "a/b/run.json");
  EXPECT_EQ(sidecar_path("run"), "run.json");
  EXPECT_EQ(sidecar_path("run.json"), "run.json.json");
}

TEST(RidgeExtract, Examples) {
  const std::vector<CellResult> mono = {cell(1, 0.1), cell(2, 0.5), cell(3, 0.9)};
  const auto r = ridge_extract(mono, 0, 10);
  EXPECT_EQ(r.theta, 3);
  EXPECT_EQ(r.accuracy, 0.9);
  const std::vector<CellResult> flat = {cell(2, 0.4), cell(1, 0.4), cell(3, 0.4)};
  EXPECT_EQ(ridge_extract(flat, 0, 10).theta, 1);
  EXPECT_THROW(ridge_extract(mono, 0.1, 10), InputError);
  EXPECT_THROW(ridge_extract(mono, 0, 11), InputError);
  EXPECT_THROW(ridge_extract({}, 0, 10), InputError);
}

TEST(RidgeExtract, SelectsSlice) {
  const std::vector<CellResult> cells = {cell(1, 0.9, 0.1), cell(2, 0.5, 0.0), cell(3, 0.7, 0.0, 20)};
  EXPECT_EQ(ridge_extract(cells, 0.0, 10).theta, 2);
  EXPECT_EQ(ridge_extract(cells, 0.1, 10).theta, 1);
  EXPECT_EQ(ridge_extract(cells, 0.0, 20).theta, 3);
}

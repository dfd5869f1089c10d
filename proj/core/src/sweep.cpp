#include "probeleak/sweep.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "probeleak/parallel.hpp"
#include "probeleak/rng.hpp"
#include "probeleak/serialize.hpp"

namespace probeleak {

using nlohmann::json;

namespace {

const std::set<std::string> kConfigFields = {
    "schema_version", "depth",   "theta_grid", "lambda_grid", "shots_grid", "trials",
    "master_seed",    "decoder", "order",      "output",      "threads",    "record_timing"};

std::vector<double> parse_real_grid(const json& j, const char* name) {
  try {
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.is_object()) {
      for (const auto& [key, _] : j.items())
        if (key != "start" && key != "stop" && key != "count")
          throw InputError(std::string(name) + ": unknown grid field '" + key + "'");
      const json& count = j.at("count");
      if (!count.is_number_unsigned() || count.get<std::uint64_t>() > 1000000)
        throw InputError(std::string(name) + ": count must be an integer in 1..1000000");
      return linspace(j.at("start").get<double>(), j.at("stop").get<double>(),
                      count.get<std::size_t>());
    }
  } catch (const json::exception& e) {
    throw InputError(std::string(name) + ": " + e.what());
  }
  throw InputError(std::string(name) + " must be an array or a {start, stop, count} object");
}

// nlohmann converts -1 to 2^64 - 1 without complaint, so unsigned fields
// are checked for sign before conversion.
bool negative_anywhere(const json& v) {
  if (v.is_number_integer() && !v.is_number_unsigned()) return true;
  if (v.is_number_float()) return v.get<double>() < 0;
  if (v.is_array())
    for (const auto& x : v)
      if (negative_anywhere(x)) return true;
  return false;
}

template <typename T>
T field(const json& j, const char* key) {
  try {
    constexpr bool is_unsigned = std::is_unsigned_v<T> || std::is_same_v<T, std::vector<std::uint64_t>>;
    if (is_unsigned && negative_anywhere(j.at(key)))
      throw InputError(std::string("field '") + key + "' must be non-negative");
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config field '") + key + "': " + e.what());
  }
}

std::string perpos_json(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s + "]";
}

// Splits one CSV line honouring double-quoted fields.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

template <typename T>
T parse_cell(const std::string& s, const char* column) {
  try {
    std::size_t used = 0;
    T v;
    if constexpr (std::is_same_v<T, double>) {
      v = std::stod(s, &used);
    } else {
      v = static_cast<T>(std::stoull(s, &used));
    }
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string("bad value '") + s + "' in column " + column);
  }
}

class CsvSink {
 public:
  CsvSink(const SweepConfig& config) : config_(config) {
    if (config.output.empty()) return;
    out_.open(config.output, std::ios::binary | std::ios::trunc);
    if (!out_) throw InputError("cannot open '" + config.output + "' for writing");
    out_ << results_csv_header();
    out_.flush();
  }

  void emit(const CellResult& cell) {
    ++rows_;
    if (out_.is_open()) out_ << results_csv_row(cell);
  }

  void finish(bool complete) {
    if (!out_.is_open()) return;
    if (!complete) out_ << "# INCOMPLETE\n";
    out_.close();
    json side;
    side["config"] = json::parse(sweep_config_to_json(config_));
    side["run"] = {{"rows", rows_},
                   {"complete", complete},
                   {"csv", std::filesystem::path(config_.output).filename().string()}};
    write_file(sidecar_path(config_.output), side.dump(2) + "\n");
  }

 private:
  const SweepConfig& config_;
  std::ofstream out_;
  std::size_t rows_ = 0;
};

}  // namespace

void SweepConfig::validate() const {
  if (depth == 0) throw InputError("depth must be at least 1");
  if (depth > kMaxDepth) throw CapacityError("depth exceeds cap");
  sequence_count(depth, kExactEnumerationCap);
  if (theta_grid.empty() || lambda_grid.empty() || shots_grid.empty())
    throw InputError("every grid must be non-empty");
  for (double th : theta_grid) detail::require_finite(th, "theta grid value");
  for (double l : lambda_grid) detail::require_probability(l, "lambda grid value");
  for (auto n : shots_grid)
    if (n == 0) throw InputError("shot counts must be at least 1");
  if (trials == 0) throw InputError("trials must be at least 1");
}

SweepConfig sweep_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kConfigFields.count(key)) throw InputError("unknown config field '" + key + "'");
  if (!j.contains("schema_version")) throw InputError("config lacks schema_version");
  if (field<int>(j, "schema_version") != kSweepSchemaVersion)
    throw InputError("unsupported config schema_version");
  for (const char* required : {"depth", "theta_grid", "lambda_grid", "shots_grid"})
    if (!j.contains(required)) throw InputError(std::string("config lacks '") + required + "'");

  SweepConfig c;
  c.depth = field<std::size_t>(j, "depth");
  c.theta_grid = parse_real_grid(j.at("theta_grid"), "theta_grid");
  c.lambda_grid = parse_real_grid(j.at("lambda_grid"), "lambda_grid");
  c.shots_grid = field<std::vector<std::uint64_t>>(j, "shots_grid");
  if (j.contains("trials")) c.trials = field<std::uint64_t>(j, "trials");
  if (j.contains("master_seed")) c.master_seed = field<std::uint64_t>(j, "master_seed");
  if (j.contains("decoder")) c.decoder = parse_decoder(field<std::string>(j, "decoder"));
  if (j.contains("order")) c.order = parse_step_order(field<std::string>(j, "order"));
  if (j.contains("output")) c.output = field<std::string>(j, "output");
  if (j.contains("threads")) c.threads = field<std::size_t>(j, "threads");
  if (j.contains("record_timing")) c.record_timing = field<bool>(j, "record_timing");
  c.validate();
  return c;
}

std::string sweep_config_to_json(const SweepConfig& c) {
  json j;
  j["schema_version"] = kSweepSchemaVersion;
  j["depth"] = c.depth;
  j["theta_grid"] = c.theta_grid;
  j["lambda_grid"] = c.lambda_grid;
  j["shots_grid"] = c.shots_grid;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["decoder"] = decoder_name(c.decoder);
  j["order"] = step_order_tag(c.order);
  j["output"] = c.output;
  j["threads"] = c.threads;
  j["record_timing"] = c.record_timing;
  return j.dump(2) + "\n";
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t theta_index,
                        std::size_t lambda_index, std::size_t shots_index) {
  return derive_seed(master_seed, {theta_index, lambda_index, shots_index});
}

std::string results_csv_header() {
  return "theta,lambda,shots,depth,trials,strict_acc,wilson_hw,perpos_acc_json,cell_seed,wall_ms\n";
}

std::string results_csv_row(const CellResult& c) {
  std::string s;
  s += format_double(c.theta) + ",";
  s += format_double(c.lambda) + ",";
  s += std::to_string(c.shots) + ",";
  s += std::to_string(c.depth) + ",";
  s += std::to_string(c.trials) + ",";
  s += format_double(c.strict_accuracy) + ",";
  s += format_double(c.wilson_halfwidth) + ",";
  s += "\"" + perpos_json(c.per_position_accuracy) + "\",";
  s += std::to_string(c.cell_seed) + ",";
  s += format_double(c.wall_ms) + "\n";
  return s;
}

std::string sidecar_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  if (p.extension() == ".json") return csv_path + ".json";
  p.replace_extension(".json");
  return p.string();
}

std::vector<CellResult> run_sweep(const SweepConfig& config, const SweepRunOptions& options) {
  config.validate();
  const std::size_t n_theta = config.theta_grid.size();
  const std::size_t n_lambda = config.lambda_grid.size();
  const std::size_t n_shots = config.shots_grid.size();
  const std::size_t columns = n_theta * n_lambda;

  CsvSink sink(config);
  std::vector<std::optional<CellResult>> cells(config.cell_count());
  std::vector<CellResult> emitted;
  emitted.reserve(config.cell_count());
  std::mutex mutex;
  std::size_t next_to_emit = 0;

  auto flush_ready = [&] {
    while (next_to_emit < cells.size() && cells[next_to_emit]) {
      sink.emit(*cells[next_to_emit]);
      emitted.push_back(*cells[next_to_emit]);
      ++next_to_emit;
    }
  };

  auto run_column = [&](std::size_t col) {
    if (options.cancel && options.cancel->load()) throw Interrupted("sweep interrupted");
    const std::size_t it = col / n_lambda;
    const std::size_t il = col % n_lambda;
    const double theta = config.theta_grid[it];
    const double lambda = config.lambda_grid[il];
    const LawTable table(config.depth, theta, lambda, config.order);
    std::optional<PositionMeansTable> means;
    if (config.decoder == Decoder::PerPosition) means.emplace(table);

    std::vector<CellResult> local;
    for (std::size_t in = 0; in < n_shots; ++in) {
      const auto start = std::chrono::steady_clock::now();
      AccuracyConfig ac{config.depth, theta, lambda, config.shots_grid[in], config.trials,
                        cell_seed(config.master_seed, it, il, in), config.decoder, config.order};
      const AccuracyReport r = evaluate_accuracy(ac, table, means ? &*means : nullptr);
      const double ms =
          config.record_timing
              ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count()
              : 0.0;
      local.push_back(CellResult{theta, lambda, config.shots_grid[in], config.depth, r.trials,
                                 r.strict_accuracy, r.per_position_accuracy, r.wilson_halfwidth,
                                 ac.seed, ms});
    }
    std::lock_guard lock(mutex);
    for (std::size_t in = 0; in < n_shots; ++in) cells[col * n_shots + in] = std::move(local[in]);
    flush_ready();
  };

  try {
    parallel_for(columns, config.threads, run_column);
  } catch (...) {
    sink.finish(false);
    throw;
  }
  sink.finish(true);
  return emitted;
}

ResultsFile parse_results_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line + "\n" != results_csv_header())
    throw InputError("results CSV header does not match the expected columns");
  ResultsFile file{{}, true};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "# INCOMPLETE") {
      file.complete = false;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 10) throw InputError("results CSV row has " + std::to_string(f.size()) + " fields");
    CellResult c;
    c.theta = parse_cell<double>(f[0], "theta");
    c.lambda = parse_cell<double>(f[1], "lambda");
    c.shots = parse_cell<std::uint64_t>(f[2], "shots");
    c.depth = parse_cell<std::size_t>(f[3], "depth");
    c.trials = parse_cell<std::uint64_t>(f[4], "trials");
    c.strict_accuracy = parse_cell<double>(f[5], "strict_acc");
    c.wilson_halfwidth = parse_cell<double>(f[6], "wilson_hw");
    try {
      c.per_position_accuracy = json::parse(f[7]).get<std::vector<double>>();
    } catch (const json::exception&) {
      throw InputError("bad perpos_acc_json value '" + f[7] + "'");
    }
    c.cell_seed = parse_cell<std::uint64_t>(f[8], "cell_seed");
    c.wall_ms = parse_cell<double>(f[9], "wall_ms");
    file.cells.push_back(std::move(c));
  }
  return file;
}

RidgePoint ridge_extract(const std::vector<CellResult>& results, double lambda,
                         std::uint64_t shots) {
  std::optional<RidgePoint> best;
  for (const auto& c : results) {
    if (c.lambda != lambda || c.shots != shots) continue;
    if (!best || c.strict_accuracy > best->accuracy ||
        (c.strict_accuracy == best->accuracy && c.theta < best->theta))
      best = RidgePoint{c.theta, c.strict_accuracy};
  }
  if (!best) throw InputError("no cells match the requested (lambda, shots) slice");
  return *best;
}

}  // namespace probeleak

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>

#include "CLI11.hpp"
#include "probeleak/analysis.hpp"
#include "probeleak/decode.hpp"
#include "probeleak/errors.hpp"
#include "probeleak/protocol.hpp"
#include "probeleak/render.hpp"
#include "probeleak/serialize.hpp"
#include "probeleak/sweep.hpp"

namespace probeleak::cli {

namespace {

struct Flags {
  std::size_t k = 2;
  double theta = 0.0;
  double lambda = 0.0;
  std::uint64_t shots = 1024;
  std::uint64_t trials = kDefaultTrials;
  std::uint64_t seed = kDefaultMasterSeed;
  std::string seq;
  std::string config;
  std::string out;
  std::string decoder = "ml";
  std::string order = "gncm";
  std::string window;
  std::size_t grid = 0;
  bool pi_units = false;
  std::string hist;
  std::vector<std::string> inputs;
  std::string colormap = "viridis";
  std::vector<double> overlays;
  bool smoothing = false;
};

double angle(const Flags& f, double x) { return f.pi_units ? x * std::numbers::pi : x; }

std::pair<double, double> parse_window(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InputError("--window expects A,B");
  auto number = [](std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw InputError("--window: bad number '" + std::string(s) + "'");
    return v;
  };
  const std::string_view view(text);
  return {number(view.substr(0, comma)), number(view.substr(comma + 1))};
}

std::string format_law(const ObservationLaw& law) {
  std::string s = "P = [";
  for (std::size_t i = 0; i < law.size(); ++i) {
    if (i) s += ", ";
    s += format_trimmed(law[i], 12);
  }
  return s + "]";
}

HistogramRecord load_histogram(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return histogram_from_json(text);
  return histogram_from_text(text);
}

int cmd_law(const Flags& f, std::ostream& out) {
  const auto seq = GateSequence::parse(f.seq);
  const auto law = exact_law(seq, angle(f, f.theta), f.lambda, parse_step_order(f.order));
  out << format_law(law) << "\n";
  if (!f.out.empty()) write_file(f.out, law_to_json(law));
  return kOk;
}

int cmd_sample(const Flags& f, std::ostream& out) {
  if (f.out.empty()) throw InputError("sample needs --out PATH for the histogram");
  const auto seq = GateSequence::parse(f.seq);
  const auto law = exact_law(seq, angle(f, f.theta), f.lambda, parse_step_order(f.order));
  const auto hist = sample_histogram(law, f.shots, f.seed);
  write_file(f.out, histogram_to_json(hist, f.seed));
  out << format_law(law) << "\n";
  out << "C = [";
  for (std::size_t i = 0; i < hist.counts().size(); ++i) out << (i ? ", " : "") << hist.counts()[i];
  out << "]\n";
  return kOk;
}

int cmd_decode(const Flags& f, std::ostream& out) {
  if (f.hist.empty()) throw InputError("decode needs --hist PATH");
  const auto record = load_histogram(f.hist);
  const auto& hist = record.histogram;
  const LawTable table(hist.depth(), angle(f, f.theta), f.lambda, parse_step_order(f.order));
  if (parse_decoder(f.decoder) == Decoder::ML) {
    const auto r = ml_decode(hist, table, DecodeOptions{f.smoothing});
    out << r.predicted.to_string() << "\n";
    out << "log_likelihood = " << format_double(r.log_likelihood) << "\n";
    out << "margin = " << format_double(r.runner_up_margin) << "\n";
  } else {
    out << per_position_decode(hist, PositionMeansTable(table)).to_string() << "\n";
  }
  return kOk;
}

int cmd_sweep(const Flags& f, std::ostream& out, std::ostream& err,
              const std::atomic<bool>* cancel) {
  if (f.config.empty()) throw InputError("sweep needs --config PATH");
  if (!std::filesystem::exists(f.config))
    throw InputError("config file '" + f.config + "' does not exist");
  auto config = sweep_config_from_json(read_file(f.config));
  if (!f.out.empty()) config.output = f.out;
  const auto results = run_sweep(config, SweepRunOptions{cancel});
  if (config.output.empty()) {
    out << results_csv_header();
    for (const auto& c : results) out << results_csv_row(c);
  } else {
    err << "wrote " << results.size() << " rows to " << config.output << " and "
        << sidecar_path(config.output) << "\n";
  }
  return kOk;
}

int cmd_blindspots(const Flags& f, std::ostream& out) {
  BlindSpotOptions opts;
  if (!f.window.empty()) {
    const auto [a, b] = parse_window(f.window);
    opts.window_lo = angle(f, a);
    opts.window_hi = angle(f, b);
  }
  if (f.grid) opts.step = 2 * std::numbers::pi / static_cast<double>(f.grid);
  opts.lambda = f.lambda;
  const auto scan = blind_spot_scan(opts);
  if (!f.out.empty()) write_file(f.out, curve_to_csv(scan.thetas, scan.values));
  if (scan.roots.empty()) {
    out << "no blind spots in [" << format_double(opts.window_lo) << ", "
        << format_double(opts.window_hi) << "]\n";
    if (scan.lowest_local_min)
      out << "lowest local minimum: theta = " << format_double(scan.lowest_local_min->first)
          << ", max pairwise TV = " << format_double(scan.lowest_local_min->second) << "\n";
  }
  for (double r : scan.roots) out << format_double(r) << "\n";
  return kOk;
}

int cmd_predictor(const Flags& f, std::ostream& out) {
  if (f.k == 0) throw InputError("--k must be at least 1");
  out << format_double(theta_star(f.k)) << "\n";
  if (!f.out.empty()) {
    const auto thetas = linspace(0.0, 2 * std::numbers::pi, f.grid ? f.grid : 257);
    const auto curve = envelope(f.k, thetas);
    write_file(f.out, curve_to_csv(curve.thetas, curve.values));
  }
  return kOk;
}

int cmd_render(const Flags& f, std::ostream& err) {
  if (f.inputs.empty()) throw InputError("render needs at least one --in CSV");
  if (f.out.empty()) throw InputError("render needs --out PATH");
  RenderSpec spec;
  spec.inputs = f.inputs;
  spec.colormap = f.colormap;
  spec.output = f.out;
  if (!f.window.empty()) {
    const auto [a, b] = parse_window(f.window);
    spec.theta_range = std::pair{angle(f, a), angle(f, b)};
  }
  if (!f.overlays.empty()) {
    std::vector<double> o;
    for (double a : f.overlays) o.push_back(angle(f, a));
    spec.overlays = o;
  }
  std::vector<CellResult> cells;
  for (const auto& path : f.inputs) {
    auto file = parse_results_csv(read_file(path));
    if (!file.complete) err << "warning: " << path << " is marked incomplete\n";
    cells.insert(cells.end(), file.cells.begin(), file.cells.end());
  }
  write_file(f.out, render_heatmap(spec, cells));
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::atomic<bool>* cancel) {
  CLI::App app{"Probe-leakage simulator: exact laws, decoding, sweeps and heatmaps.", "probeleak"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  Flags f;

  auto add_theta = [&](CLI::App* s, bool required) {
    auto* o = s->add_option("--theta", f.theta, "coupling angle in radians");
    if (required) o->required();
    s->add_flag("--pi-units", f.pi_units, "read angles as multiples of pi");
  };
  auto add_order = [&](CLI::App* s) {
    s->add_option("--order", f.order, "step order: gncm or gcmn");
  };

  auto* law = app.add_subcommand("law", "print the exact law of one sequence");
  law->add_option("--seq", f.seq, "gate sequence, e.g. G1,G3")->required();
  add_theta(law, true);
  law->add_option("--lambda", f.lambda, "depolarizing strength");
  law->add_option("--out", f.out, "also write the law as JSON");
  add_order(law);

  auto* sample = app.add_subcommand("sample", "sample a shot histogram and write it as JSON");
  sample->add_option("--seq", f.seq, "gate sequence, e.g. G1,G3")->required();
  add_theta(sample, true);
  sample->add_option("--lambda", f.lambda, "depolarizing strength");
  sample->add_option("--shots", f.shots, "shots N");
  sample->add_option("--seed", f.seed, "RNG seed");
  sample->add_option("--out", f.out, "histogram JSON path")->required();
  add_order(sample);

  auto* decode = app.add_subcommand("decode", "decode a histogram file");
  decode->add_option("--hist", f.hist, "histogram JSON (or text record)")->required();
  add_theta(decode, true);
  decode->add_option("--lambda", f.lambda, "depolarizing strength");
  decode->add_option("--decoder", f.decoder, "ml or perpos");
  decode->add_flag("--smooth", f.smoothing, "smooth the laws so no candidate is eliminated");
  add_order(decode);

  auto* sweep = app.add_subcommand("sweep", "run a sweep config, writing CSV and JSON sidecar");
  sweep->add_option("--config", f.config, "sweep config JSON")->required();
  sweep->add_option("--out", f.out, "CSV path (overrides the config)");

  auto* blind = app.add_subcommand("blindspots", "scan depth-2 max pairwise TV for zeros");
  blind->add_option("--window", f.window, "scan window A,B (default 0.05,2pi-0.05)");
  blind->add_option("--grid", f.grid, "grid points per 2pi (0: 4096)");
  blind->add_option("--lambda", f.lambda, "depolarizing strength");
  blind->add_option("--out", f.out, "write the scanned curve as CSV");
  blind->add_flag("--pi-units", f.pi_units, "read angles as multiples of pi");

  auto* pred = app.add_subcommand("predictor", "print theta*(k)");
  pred->add_option("--k", f.k, "sequence depth")->required();
  pred->add_option("--grid", f.grid, "envelope points over [0, 2pi] (0: 257)");
  pred->add_option("--out", f.out, "write the envelope curve as CSV");

  auto* render = app.add_subcommand("render", "render results CSVs to an SVG heatmap");
  render->add_option("--in", f.inputs, "results CSV (repeatable)")->required();
  render->add_option("--out", f.out, "SVG path")->required();
  render->add_option("--colormap", f.colormap, "viridis or gray");
  render->add_option("--window", f.window, "theta range A,B (default: the data)");
  render->add_option("--overlay", f.overlays, "overlay angles (default theta*(k) and mirror)");
  render->add_flag("--pi-units", f.pi_units, "read angles as multiples of pi");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kInputError;
  }

  try {
    if (*law) return cmd_law(f, out);
    if (*sample) return cmd_sample(f, out);
    if (*decode) return cmd_decode(f, out);
    if (*sweep) return cmd_sweep(f, out, err, cancel);
    if (*blind) return cmd_blindspots(f, out);
    if (*pred) return cmd_predictor(f, out);
    if (*render) return cmd_render(f, err);
  } catch (const Interrupted& e) {
    err << "interrupted: " << e.what() << "\n";
    return kInterrupted;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kCapacityError;
  } catch (const ConsistencyError& e) {
    err << "internal consistency error: " << e.what() << "\n";
    return kConsistencyError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kConsistencyError;
  }
  return kInputError;
}

}  // namespace probeleak::cli

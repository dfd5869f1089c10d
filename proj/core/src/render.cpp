#include "probeleak/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "probeleak/analysis.hpp"
#include "probeleak/serialize.hpp"

namespace probeleak {

namespace {

constexpr std::array<Rgb, 10> kViridis = {{{0x44, 0x01, 0x54},
                                           {0x48, 0x28, 0x78},
                                           {0x3e, 0x49, 0x89},
                                           {0x31, 0x68, 0x8e},
                                           {0x26, 0x82, 0x8e},
                                           {0x1f, 0x9e, 0x89},
                                           {0x35, 0xb7, 0x79},
                                           {0x6e, 0xce, 0x58},
                                           {0xb5, 0xde, 0x2b},
                                           {0xfd, 0xe7, 0x25}}};
constexpr std::array<Rgb, 2> kGray = {{{0, 0, 0}, {255, 255, 255}}};

template <std::size_t N>
Rgb ramp(const std::array<Rgb, N>& stops, double v) {
  const double x = v * static_cast<double>(N - 1);
  const auto i = std::min(static_cast<std::size_t>(x), N - 2);
  const double f = x - static_cast<double>(i);
  auto mix = [f](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * f));
  };
  return {mix(stops[i].r, stops[i + 1].r), mix(stops[i].g, stops[i + 1].g),
          mix(stops[i].b, stops[i + 1].b)};
}

std::string fmt(double x) { return format_trimmed(x, 3); }

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Cell edges along an axis: midpoints between neighbours, with the outer
// cells as wide as their inner neighbour gap (unit width for a single value).
std::vector<double> edges_for(const std::vector<double>& centres) {
  const std::size_t n = centres.size();
  std::vector<double> e(n + 1);
  if (n == 1) {
    e[0] = centres[0] - 0.5;
    e[1] = centres[0] + 0.5;
    return e;
  }
  for (std::size_t i = 1; i < n; ++i) e[i] = 0.5 * (centres[i - 1] + centres[i]);
  e[0] = centres[0] - (e[1] - centres[0]);
  e[n] = centres[n - 1] + (centres[n - 1] - e[n - 1]);
  return e;
}

struct Panel {
  std::uint64_t shots;
  std::vector<double> thetas;
  std::vector<double> lambdas;
  std::map<std::pair<double, double>, double> values;
};

constexpr double kPanelW = 320;
constexpr double kPanelH = 220;
constexpr double kLeft = 70;
constexpr double kTop = 40;
constexpr double kGap = 60;
constexpr double kBottom = 90;
constexpr double kLegendW = 90;

}  // namespace

Rgb colormap_lookup(std::string_view name, double value) {
  const double v = std::isnan(value) ? 0.0 : std::clamp(value, 0.0, 1.0);
  if (name == "viridis") return ramp(kViridis, v);
  if (name == "gray") return ramp(kGray, v);
  throw InputError("unknown colour map '" + std::string(name) + "' (expected viridis or gray)");
}

std::string to_hex(Rgb c) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s = "#";
  for (int ch : {c.r, c.g, c.b}) {
    s += kDigits[(ch >> 4) & 0xf];
    s += kDigits[ch & 0xf];
  }
  return s;
}

std::string render_heatmap(const RenderSpec& spec, const std::vector<CellResult>& results) {
  colormap_lookup(spec.colormap, 0.0);
  if (results.empty()) throw InputError("no results to render");
  const std::size_t depth = results.front().depth;
  const std::uint64_t trials = results.front().trials;
  if (spec.theta_range && !(spec.theta_range->first <= spec.theta_range->second))
    throw InputError("theta range must satisfy lo <= hi");

  std::map<std::uint64_t, Panel> panels;
  std::set<double> all_thetas;
  for (const auto& c : results) {
    if (c.depth != depth) throw InputError("results mix several depths");
    if (spec.theta_range &&
        (c.theta < spec.theta_range->first || c.theta > spec.theta_range->second))
      continue;
    auto& p = panels[c.shots];
    p.shots = c.shots;
    if (!p.values.emplace(std::pair{c.theta, c.lambda}, c.strict_accuracy).second)
      throw InputError("duplicate cell at theta=" + format_double(c.theta) +
                       " lambda=" + format_double(c.lambda));
    all_thetas.insert(c.theta);
  }
  if (panels.empty()) throw InputError("no results inside the theta range");

  for (auto& [shots, p] : panels) {
    std::set<double> th, la;
    for (const auto& [key, _] : p.values) {
      th.insert(key.first);
      la.insert(key.second);
    }
    if (th.size() * la.size() != p.values.size())
      throw InputError("panel N=" + std::to_string(shots) + " is not a full (theta, lambda) grid");
    p.thetas.assign(th.begin(), th.end());
    p.lambdas.assign(la.begin(), la.end());
  }

  const double theta_lo = spec.theta_range ? spec.theta_range->first : *all_thetas.begin();
  const double theta_hi = spec.theta_range ? spec.theta_range->second : *all_thetas.rbegin();

  std::vector<double> overlays;
  if (spec.overlays) {
    for (double a : *spec.overlays) {
      if (!std::isfinite(a) || a < theta_lo || a > theta_hi)
        throw InputError("overlay angle " + format_double(a) + " lies outside the rendered range");
      overlays.push_back(a);
    }
  } else {
    const double ts = theta_star(depth);
    for (double a : {ts, 2 * std::numbers::pi - ts})
      if (a >= theta_lo && a <= theta_hi) overlays.push_back(a);
  }

  const double width = kLeft + panels.size() * (kPanelW + kGap) + kLegendW;
  const double height = kTop + kPanelH + kBottom;
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
       fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) +
       "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
       "\" fill=\"#ffffff\"/>\n";

  std::size_t index = 0;
  for (const auto& [shots, p] : panels) {
    const double x0 = kLeft + index * (kPanelW + kGap);
    const auto te = edges_for(p.thetas);
    const auto le = edges_for(p.lambdas);
    auto xmap = [&](double th) { return x0 + (th - te.front()) / (te.back() - te.front()) * kPanelW; };
    auto ymap = [&](double l) {
      return kTop + kPanelH - (l - le.front()) / (le.back() - le.front()) * kPanelH;
    };

    s += "<g class=\"panel\" data-shots=\"" + std::to_string(shots) + "\">\n";
    s += "<text x=\"" + fmt(x0 + kPanelW / 2) + "\" y=\"" + fmt(kTop - 12) +
         "\" text-anchor=\"middle\">N = " + std::to_string(shots) + "</text>\n";
    for (std::size_t j = 0; j < p.lambdas.size(); ++j) {
      for (std::size_t i = 0; i < p.thetas.size(); ++i) {
        const double v = p.values.at({p.thetas[i], p.lambdas[j]});
        const double x = xmap(te[i]);
        const double y = ymap(le[j + 1]);
        s += "<rect class=\"cell\" x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
             fmt(xmap(te[i + 1]) - x) + "\" height=\"" + fmt(ymap(le[j]) - y) + "\" fill=\"" +
             to_hex(colormap_lookup(spec.colormap, v)) + "\"><title>theta=" +
             format_trimmed(p.thetas[i], 6) + " lambda=" + format_trimmed(p.lambdas[j], 6) +
             " acc=" + format_trimmed(v, 6) + "</title></rect>\n";
      }
    }
    for (double a : overlays) {
      const double x = xmap(a);
      s += "<line class=\"overlay\" x1=\"" + fmt(x) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(x) +
           "\" y2=\"" + fmt(kTop + kPanelH) +
           "\" stroke=\"#ff3030\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    }
    s += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kPanelW) +
         "\" height=\"" + fmt(kPanelH) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
    // Axis ticks at the first and last grid values.
    for (double th : {p.thetas.front(), p.thetas.back()}) {
      s += "<text x=\"" + fmt(xmap(th)) + "\" y=\"" + fmt(kTop + kPanelH + 14) +
           "\" text-anchor=\"middle\">" + format_trimmed(th, 3) + "</text>\n";
    }
    for (double l : {p.lambdas.front(), p.lambdas.back()}) {
      s += "<text x=\"" + fmt(x0 - 4) + "\" y=\"" + fmt(ymap(l) + 4) +
           "\" text-anchor=\"end\">" + format_trimmed(l, 3) + "</text>\n";
    }
    s += "<text x=\"" + fmt(x0 + kPanelW / 2) + "\" y=\"" + fmt(kTop + kPanelH + 32) +
         "\" text-anchor=\"middle\">theta (rad)</text>\n";
    s += "<text x=\"" + fmt(x0 - 40) + "\" y=\"" + fmt(kTop + kPanelH / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 " + fmt(x0 - 40) + " " +
         fmt(kTop + kPanelH / 2) + ")\">lambda</text>\n";
    s += "</g>\n";
    ++index;
  }

  // Shared legend on [0, 1].
  const double lx = kLeft + panels.size() * (kPanelW + kGap) + 10;
  constexpr int kSteps = 20;
  s += "<g class=\"legend\">\n";
  for (int i = 0; i < kSteps; ++i) {
    const double v = (i + 0.5) / kSteps;
    const double y = kTop + kPanelH - (i + 1) * kPanelH / kSteps;
    s += "<rect class=\"legend-step\" x=\"" + fmt(lx) + "\" y=\"" + fmt(y) +
         "\" width=\"16\" height=\"" + fmt(kPanelH / kSteps) + "\" fill=\"" +
         to_hex(colormap_lookup(spec.colormap, v)) + "\"/>\n";
  }
  s += "<text x=\"" + fmt(lx + 20) + "\" y=\"" + fmt(kTop + kPanelH) + "\">0</text>\n";
  s += "<text x=\"" + fmt(lx + 20) + "\" y=\"" + fmt(kTop + 8) + "\">1</text>\n";
  s += "<text x=\"" + fmt(lx) + "\" y=\"" + fmt(kTop - 12) + "\">strict acc</text>\n";
  s += "</g>\n";

  std::string caption = "k = " + std::to_string(depth) + ", T = " + std::to_string(trials) +
                        ", colour map " + spec.colormap;
  if (!overlays.empty()) caption += ", dashed: theta*(k) and its mirror";
  if (!spec.inputs.empty()) {
    caption += ", source:";
    for (const auto& in : spec.inputs) caption += " " + in;
  }
  s += "<text class=\"caption\" x=\"" + fmt(kLeft) + "\" y=\"" + fmt(height - 16) + "\">" +
       xml_escape(caption) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace probeleak

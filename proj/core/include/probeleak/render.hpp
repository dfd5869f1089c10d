#pragma once

// SVG heatmaps of strict accuracy over (theta, lambda), one panel per shot
// count laid out left to right.
//
// Colour maps are fixed piecewise-linear ramps on [0, 1] (values outside are
// clamped):
//   viridis: #440154 #482878 #3e4989 #31688e #26828e #1f9e89 #35b779 #6ece58
//            #b5de2b #fde725 at equal spacing
//   gray:    #000000 -> #ffffff
// Channels are interpolated in sRGB and rounded to the nearest integer.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "probeleak/sweep.hpp"

namespace probeleak {

struct RenderSpec {
  std::vector<std::string> inputs;  // CSV paths, recorded in the caption
  std::string colormap = "viridis";
  // Only columns with theta inside [lo, hi] are drawn. Defaults to the data.
  std::optional<std::pair<double, double>> theta_range;
  // Explicit overlay angles must lie in the rendered range. When unset,
  // theta_star(k) and 2 pi - theta_star(k) are used, minus any outside it.
  std::optional<std::vector<double>> overlays;
  std::string output;
};

struct Rgb {
  int r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// InputError for an unknown map name.
Rgb colormap_lookup(std::string_view name, double value);
std::string to_hex(Rgb c);

// InputError when the results are empty, mix depths, or any panel is not a
// full rectangular (theta, lambda) grid.
std::string render_heatmap(const RenderSpec& spec, const std::vector<CellResult>& results);

}  // namespace probeleak

#pragma once

// File formats for laws and histograms.
//
// JSON (both carry "format", "version": 1, "depth", "convention": "y1-msb"):
//   law:        {"format": "probeleak.law", ..., "probs": [p_0, ...]}
//   histogram:  {"format": "probeleak.histogram", ..., "counts": [...],
//                "shots": N, "seed": S | null}
// Text records: a header line followed by one value per line, e.g.
//   probeleak-law v1 depth=2 convention=y1-msb
//   probeleak-histogram v1 depth=2 convention=y1-msb shots=10 seed=7

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "probeleak/protocol.hpp"

namespace probeleak {

struct HistogramRecord {
  ShotHistogram histogram;
  std::optional<std::uint64_t> seed;
};

std::string law_to_json(const ObservationLaw& law);
ObservationLaw law_from_json(std::string_view text);

std::string histogram_to_json(const ShotHistogram& hist, std::optional<std::uint64_t> seed);
HistogramRecord histogram_from_json(std::string_view text);

std::string law_to_text(const ObservationLaw& law);
ObservationLaw law_from_text(std::string_view text);

std::string histogram_to_text(const ShotHistogram& hist, std::optional<std::uint64_t> seed);
HistogramRecord histogram_from_text(std::string_view text);

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

// Fixed `decimals` places with trailing zeros (and a bare '.') removed;
// "-0" is printed as "0".
std::string format_trimmed(double x, int decimals);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace probeleak

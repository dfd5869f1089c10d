#include "probeleak/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "probeleak/errors.hpp"

namespace probeleak {

using nlohmann::json;

namespace {

constexpr std::string_view kLawFormat = "probeleak.law";
constexpr std::string_view kHistFormat = "probeleak.histogram";

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

void check_header(const json& j, std::string_view format) {
  if (!j.is_object()) throw InputError("expected a JSON object");
  if (j.value("format", std::string{}) != format)
    throw InputError("expected format '" + std::string(format) + "'");
  if (j.value("version", 0) != 1) throw InputError("unsupported format version");
  if (j.value("convention", std::string{}) != kBitConvention)
    throw InputError("unsupported bit-string convention");
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
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  try {
    constexpr bool is_unsigned = std::is_unsigned_v<T> || std::is_same_v<T, std::vector<std::uint64_t>>;
    if (is_unsigned && negative_anywhere(j.at(key)))
      throw InputError(std::string("field '") + key + "' must be non-negative");
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("bad field '") + key + "': " + e.what());
  }
}

json header(std::string_view format, std::size_t depth) {
  json j;
  j["format"] = format;
  j["version"] = 1;
  j["depth"] = depth;
  j["convention"] = kBitConvention;
  return j;
}

// Splits text into the header tokens and the remaining lines.
std::pair<std::vector<std::string>, std::vector<std::string>> split_record(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty record");
  std::vector<std::string> head;
  std::istringstream hs(line);
  for (std::string tok; hs >> tok;) head.push_back(tok);
  std::vector<std::string> body;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    body.push_back(line);
  }
  return {head, body};
}

std::string header_value(const std::vector<std::string>& head, std::string_view key) {
  for (const auto& tok : head) {
    if (tok.size() > key.size() && tok.compare(0, key.size(), key) == 0 && tok[key.size()] == '=')
      return tok.substr(key.size() + 1);
  }
  throw InputError("record header lacks '" + std::string(key) + "'");
}

template <typename T>
T parse_number(const std::string& s) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InputError("bad number '" + s + "' in record");
  return v;
}

void check_text_header(const std::vector<std::string>& head, std::string_view magic) {
  if (head.size() < 2 || head[0] != magic || head[1] != "v1")
    throw InputError("expected '" + std::string(magic) + " v1' record header");
  if (header_value(head, "convention") != kBitConvention)
    throw InputError("unsupported bit-string convention");
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw ConsistencyError("to_chars failed");
  return std::string(buf, ptr);
}

std::string format_trimmed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string law_to_json(const ObservationLaw& law) {
  json j = header(kLawFormat, law.depth());
  j["probs"] = std::vector<double>(law.probs().begin(), law.probs().end());
  return j.dump(2) + "\n";
}

ObservationLaw law_from_json(std::string_view text) {
  const json j = parse_json(text);
  check_header(j, kLawFormat);
  auto law = ObservationLaw::from_probs(get_field<std::vector<double>>(j, "probs"));
  if (get_field<std::size_t>(j, "depth") != law.depth())
    throw InputError("law depth field disagrees with vector length");
  return law;
}

std::string histogram_to_json(const ShotHistogram& hist, std::optional<std::uint64_t> seed) {
  json j = header(kHistFormat, hist.depth());
  j["counts"] = std::vector<std::uint64_t>(hist.counts().begin(), hist.counts().end());
  j["shots"] = hist.shots();
  j["seed"] = seed ? json(*seed) : json(nullptr);
  return j.dump(2) + "\n";
}

HistogramRecord histogram_from_json(std::string_view text) {
  const json j = parse_json(text);
  check_header(j, kHistFormat);
  auto hist = ShotHistogram::from_counts(get_field<std::vector<std::uint64_t>>(j, "counts"));
  if (get_field<std::size_t>(j, "depth") != hist.depth())
    throw InputError("histogram depth field disagrees with vector length");
  if (get_field<std::uint64_t>(j, "shots") != hist.shots())
    throw InputError("histogram shots field disagrees with counts");
  std::optional<std::uint64_t> seed;
  if (j.contains("seed") && !j.at("seed").is_null()) seed = get_field<std::uint64_t>(j, "seed");
  return {std::move(hist), seed};
}

std::string law_to_text(const ObservationLaw& law) {
  std::string s = "probeleak-law v1 depth=" + std::to_string(law.depth()) +
                  " convention=" + std::string(kBitConvention) + "\n";
  for (double p : law.probs()) s += format_double(p) + "\n";
  return s;
}

ObservationLaw law_from_text(std::string_view text) {
  auto [head, body] = split_record(text);
  check_text_header(head, "probeleak-law");
  std::vector<double> p;
  p.reserve(body.size());
  for (const auto& line : body) p.push_back(parse_number<double>(line));
  auto law = ObservationLaw::from_probs(std::move(p));
  if (parse_number<std::size_t>(header_value(head, "depth")) != law.depth())
    throw InputError("law depth field disagrees with vector length");
  return law;
}

std::string histogram_to_text(const ShotHistogram& hist, std::optional<std::uint64_t> seed) {
  std::string s = "probeleak-histogram v1 depth=" + std::to_string(hist.depth()) +
                  " convention=" + std::string(kBitConvention) +
                  " shots=" + std::to_string(hist.shots()) +
                  " seed=" + (seed ? std::to_string(*seed) : std::string("none")) + "\n";
  for (std::uint64_t c : hist.counts()) s += std::to_string(c) + "\n";
  return s;
}

HistogramRecord histogram_from_text(std::string_view text) {
  auto [head, body] = split_record(text);
  check_text_header(head, "probeleak-histogram");
  std::vector<std::uint64_t> c;
  c.reserve(body.size());
  for (const auto& line : body) c.push_back(parse_number<std::uint64_t>(line));
  auto hist = ShotHistogram::from_counts(std::move(c));
  if (parse_number<std::size_t>(header_value(head, "depth")) != hist.depth() ||
      parse_number<std::uint64_t>(header_value(head, "shots")) != hist.shots())
    throw InputError("histogram header disagrees with counts");
  std::optional<std::uint64_t> seed;
  if (const auto sv = header_value(head, "seed"); sv != "none") seed = parse_number<std::uint64_t>(sv);
  return {std::move(hist), seed};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("failed writing '" + path + "'");
}

}  // namespace probeleak

#include "probeleak/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "probeleak/errors.hpp"
#include "probeleak/parallel.hpp"
#include "probeleak/rng.hpp"
#include "probeleak/serialize.hpp"

namespace probeleak {

namespace {

void require_same_depth(const ObservationLaw& p, const ObservationLaw& q) {
  if (p.size() != q.size()) throw InputError("laws have different depths");
}

void require_power_of_two(std::size_t n) {
  if (n == 0 || !std::has_single_bit(n)) throw InputError("length must be a power of two");
}

// x log(x / y) with the 0 log 0 convention; +inf if x > 0 = y.
double kl_term(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return std::numeric_limits<double>::infinity();
  return x * std::log(x / y);
}

}  // namespace

double tv(const ObservationLaw& p, const ObservationLaw& q) {
  require_same_depth(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * s);
}

double kl(const ObservationLaw& p, const ObservationLaw& q) {
  require_same_depth(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += kl_term(p[i], q[i]);
    if (std::isinf(s)) return s;
  }
  return std::max(0.0, s);
}

double js(const ObservationLaw& p, const ObservationLaw& q) {
  require_same_depth(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    s += 0.5 * kl_term(p[i], m) + 0.5 * kl_term(q[i], m);
  }
  return std::clamp(s, 0.0, std::numbers::ln2);
}

Metric parse_metric(std::string_view name) {
  if (name == "tv") return Metric::TV;
  if (name == "kl") return Metric::KL;
  if (name == "js") return Metric::JS;
  throw InputError("unknown metric '" + std::string(name) + "'");
}

double divergence(Metric m, const ObservationLaw& p, const ObservationLaw& q) {
  switch (m) {
    case Metric::TV: return tv(p, q);
    case Metric::KL: return kl(p, q);
    case Metric::JS: return js(p, q);
  }
  throw InputError("unknown metric");
}

ClassMeans class_means(std::size_t position, std::size_t depth, double theta, double lambda,
                       const std::variant<ExactMeans, MonteCarloMeans>& mode, StepOrder order) {
  if (depth == 0 || depth > kMaxDepth) throw InputError("depth out of range");
  if (position < 1 || position > depth) throw InputError("position must lie in 1..k");
  detail::require_probability(lambda, "depolarizing strength");
  const KrausPair kraus = instrument_kraus(theta);
  const std::size_t width = std::size_t{1} << depth;

  std::array<std::vector<double>, kAlphabetSize> sum;
  std::array<std::vector<double>, kAlphabetSize> sum_sq;
  for (auto& v : sum) v.assign(width, 0.0);
  std::vector<double> law(width);
  std::vector<Gate> gates(depth);
  std::uint64_t per_class = 0;
  const bool monte_carlo = std::holds_alternative<MonteCarloMeans>(mode);

  if (!monte_carlo) {
    const std::uint64_t total = sequence_count(depth, kExactEnumerationCap);
    per_class = total / kAlphabetSize;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      const auto seq = GateSequence::from_index(idx, depth);
      exact_law_into(seq.gates(), kraus, lambda, order, law);
      auto& acc = sum[static_cast<std::size_t>(seq[position - 1])];
      for (std::size_t b = 0; b < width; ++b) acc[b] += law[b];
    }
  } else {
    const auto& mc = std::get<MonteCarloMeans>(mode);
    if (mc.samples < 2) throw InputError("Monte Carlo class means need at least 2 samples");
    per_class = mc.samples;
    for (auto& v : sum_sq) v.assign(width, 0.0);
    for (std::size_t a = 0; a < kAlphabetSize; ++a) {
      Xoshiro256ss rng(derive_seed(mc.seed, {position, a}));
      for (std::uint64_t s = 0; s < mc.samples; ++s) {
        for (std::size_t t = 0; t < depth; ++t)
          gates[t] = t + 1 == position ? static_cast<Gate>(a)
                                       : static_cast<Gate>(rng.below(kAlphabetSize));
        exact_law_into(gates, kraus, lambda, order, law);
        for (std::size_t b = 0; b < width; ++b) {
          sum[a][b] += law[b];
          sum_sq[a][b] += law[b] * law[b];
        }
      }
    }
  }

  const auto n = static_cast<double>(per_class);
  std::array<std::vector<double>, kAlphabetSize> errors;
  std::vector<ObservationLaw> means;
  for (std::size_t a = 0; a < kAlphabetSize; ++a) {
    std::vector<double> mean(width);
    for (std::size_t b = 0; b < width; ++b) mean[b] = sum[a][b] / n;
    if (monte_carlo) {
      errors[a].resize(width);
      for (std::size_t b = 0; b < width; ++b) {
        const double var = std::max(0.0, (sum_sq[a][b] - n * mean[b] * mean[b]) / (n - 1.0));
        errors[a][b] = std::sqrt(var / n);
      }
    }
    means.push_back(ObservationLaw::from_probs(std::move(mean)));
  }
  return ClassMeans{position, {means[0], means[1], means[2]}, per_class, std::move(errors)};
}

double pairwise_separation(const GateSequence& u, const GateSequence& v, double theta,
                           double lambda, Metric metric, StepOrder order) {
  if (u.depth() != v.depth()) throw InputError("sequences have different depths");
  return divergence(metric, exact_law(u, theta, lambda, order), exact_law(v, theta, lambda, order));
}

double max_pairwise_tv(std::size_t depth, double theta, double lambda, StepOrder order) {
  const std::uint64_t n = sequence_count(depth, kExactEnumerationCap);
  const std::size_t width = std::size_t{1} << depth;
  const KrausPair kraus = instrument_kraus(theta);
  std::vector<double> laws(n * width);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto seq = GateSequence::from_index(i, depth);
    exact_law_into(seq.gates(), kraus, lambda, order,
                   std::span<double>(laws).subspan(i * width, width));
  }
  double worst = 0.0;
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t b = 0; b < width; ++b) s += std::abs(laws[i * width + b] - laws[j * width + b]);
      worst = std::max(worst, 0.5 * s);
    }
  return worst;
}

double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol) {
  if (!(a < b)) throw InputError("golden-section bracket is empty");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

BlindSpotScan blind_spot_scan(const BlindSpotOptions& opt) {
  constexpr double kEdge = 0.05;
  const double two_pi = 2.0 * std::numbers::pi;
  if (!(opt.window_lo < opt.window_hi)) throw InputError("blind-spot window is empty");
  if (opt.window_lo < kEdge - 1e-12 || opt.window_hi > two_pi - kEdge + 1e-12)
    throw InputError("blind-spot window must stay inside (0.05, 2 pi - 0.05)");
  if (!(opt.step > 0.0)) throw InputError("grid step must be positive");
  detail::require_probability(opt.lambda, "depolarizing strength");

  BlindSpotScan scan;
  const auto intervals =
      static_cast<std::size_t>(std::ceil((opt.window_hi - opt.window_lo) / opt.step - 1e-9));
  scan.thetas = linspace(opt.window_lo, opt.window_hi, std::max<std::size_t>(intervals, 1) + 1);
  scan.values.resize(scan.thetas.size());
  parallel_for(scan.thetas.size(), opt.threads, [&](std::size_t i) {
    scan.values[i] = max_pairwise_tv(2, scan.thetas[i], opt.lambda);
  });

  const auto s = [&](double th) { return max_pairwise_tv(2, th, opt.lambda); };
  for (std::size_t i = 1; i + 1 < scan.values.size(); ++i) {
    const double v = scan.values[i];
    if (!(v <= scan.values[i - 1] && v <= scan.values[i + 1])) continue;
    if (!scan.lowest_local_min || v < scan.lowest_local_min->second)
      scan.lowest_local_min = std::make_pair(scan.thetas[i], v);
    if (v >= opt.detect_threshold) continue;
    const double root =
        golden_section_minimize(s, scan.thetas[i - 1], scan.thetas[i + 1], opt.theta_tolerance);
    if (s(root) < opt.root_threshold) scan.roots.push_back(root);
  }
  return scan;
}

double envelope_value(std::size_t depth, double theta) {
  if (depth < 1) throw InputError("envelope depth must be at least 1");
  const double s = std::sin(theta / 2.0);
  return s * s * std::pow(std::cos(theta / 2.0), static_cast<double>(depth));
}

EnvelopeCurve envelope(std::size_t depth, std::span<const double> thetas) {
  if (depth < 1) throw InputError("envelope depth must be at least 1");
  EnvelopeCurve c{depth, std::vector<double>(thetas.begin(), thetas.end()), {}};
  c.values.reserve(thetas.size());
  for (double th : thetas) c.values.push_back(envelope_value(depth, th));
  return c;
}

double EnvelopeCurve::argmax() const {
  if (values.empty()) throw InputError("empty envelope curve");
  const auto it = std::max_element(values.begin(), values.end());
  return thetas[static_cast<std::size_t>(it - values.begin())];
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) throw InputError("linspace needs at least one point");
  if (count == 1) return {lo};
  std::vector<double> v(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) v[i] = lo + step * static_cast<double>(i);
  v.back() = hi;
  return v;
}

double theta_star(std::size_t depth) {
  if (depth < 1) throw InputError("theta_star requires k >= 1");
  // 2 asin sqrt(2/(k+2)) rewritten through tan^2(x) = 2/k; the atan form
  // lands exactly on pi/2 at k = 2.
  return 2.0 * std::atan(std::sqrt(2.0 / static_cast<double>(depth)));
}

double mirror_deviation(std::size_t depth, double theta, double lambda, StepOrder order) {
  const std::uint64_t n = sequence_count(depth, kExactEnumerationCap);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto seq = GateSequence::from_index(i, depth);
    worst = std::max(worst, tv(exact_law(seq, theta, lambda, order),
                               exact_law(seq, 2.0 * std::numbers::pi - theta, lambda, order)));
  }
  return worst;
}

void wht_inplace(std::span<double> x) {
  require_power_of_two(x.size());
  const std::size_t n = x.size();
  for (std::size_t h = 1; h < n; h *= 2) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double u = x[j];
        const double v = x[j + h];
        x[j] = u + v;
        x[j + h] = u - v;
      }
    }
  }
}

std::vector<double> wht(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  wht_inplace(out);
  return out;
}

std::vector<double> gray_reorder(std::span<const double> x) {
  require_power_of_two(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i ^ (i >> 1)];
  return out;
}

std::vector<double> gray_restore(std::span<const double> x) {
  require_power_of_two(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i ^ (i >> 1)] = x[i];
  return out;
}

std::string curve_to_csv(std::span<const double> thetas, std::span<const double> values) {
  if (thetas.size() != values.size()) throw InputError("curve columns differ in length");
  std::string s = "theta,value\n";
  for (std::size_t i = 0; i < thetas.size(); ++i)
    s += format_double(thetas[i]) + "," + format_double(values[i]) + "\n";
  return s;
}

std::string curve_to_json(std::span<const double> thetas, std::span<const double> values) {
  if (thetas.size() != values.size()) throw InputError("curve columns differ in length");
  nlohmann::json j;
  j["theta"] = std::vector<double>(thetas.begin(), thetas.end());
  j["value"] = std::vector<double>(values.begin(), values.end());
  return j.dump(2) + "\n";
}

}  // namespace probeleak

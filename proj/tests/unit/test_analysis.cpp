#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "gen.hpp"
#include "probeleak/analysis.hpp"
#include "probeleak/errors.hpp"

using namespace probeleak;
namespace t = probeleak::testing;

namespace {

constexpr double kPi = std::numbers::pi;
const double kLn2 = std::log(2.0);

ObservationLaw law2(double p0) { return ObservationLaw::from_probs({p0, 1 - p0}); }

}  // namespace

TEST(Metrics, TvExamples) {
  t::Engine e(1);
  const auto p = t::law(e, 4);
  EXPECT_EQ(tv(p, p), 0);
  EXPECT_EQ(tv(ObservationLaw::point_mass(1, 0), ObservationLaw::point_mass(1, 1)), 1);
  EXPECT_EQ(tv(ObservationLaw::uniform(1), ObservationLaw::point_mass(1, 0)), 0.5);
  EXPECT_THROW(tv(ObservationLaw::uniform(1), ObservationLaw::uniform(2)), InputError);
}

TEST(Metrics, KlExamples) {
  t::Engine e(2);
  const auto p = t::law(e, 3);
  EXPECT_EQ(kl(p, p), 0);
  EXPECT_NEAR(kl(ObservationLaw::point_mass(1, 0), ObservationLaw::uniform(1)), kLn2, 1e-15);
  EXPECT_EQ(kl(ObservationLaw::uniform(1), ObservationLaw::point_mass(1, 0)),
            std::numeric_limits<double>::infinity());
  EXPECT_THROW(kl(ObservationLaw::uniform(1), ObservationLaw::uniform(2)), InputError);
}

TEST(Metrics, JsExamples) {
  t::Engine e(3);
  const auto p = t::law(e, 3);
  EXPECT_NEAR(js(p, p), 0, 1e-16);
  EXPECT_NEAR(js(ObservationLaw::point_mass(1, 0), ObservationLaw::point_mass(1, 1)), kLn2, 1e-15);
  EXPECT_THROW(js(ObservationLaw::uniform(1), ObservationLaw::uniform(2)), InputError);
}

TEST(Metrics, AxiomsOnRandomPairs) {
  t::Engine e(4);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t k = 1 + i % 6;
    const auto p = t::law(e, k, 0.2);
    const auto q = t::law(e, k, 0.2);
    EXPECT_EQ(tv(p, q), tv(q, p));
    EXPECT_GE(tv(p, q), 0);
    EXPECT_LE(tv(p, q), 1);
    EXPECT_GE(kl(p, q), 0);
    EXPECT_NEAR(js(p, q), js(q, p), 1e-14);
    EXPECT_GE(js(p, q), 0);
    EXPECT_LE(js(p, q), kLn2);
    EXPECT_EQ(divergence(Metric::TV, p, q), tv(p, q));
  }
}

TEST(Metrics, KlByHand) {
  const double expected = 0.3 * std::log(0.3 / 0.6) + 0.7 * std::log(0.7 / 0.4);
  EXPECT_NEAR(kl(law2(0.3), law2(0.6)), expected, 1e-15);
  EXPECT_EQ(parse_metric("kl"), Metric::KL);
  EXPECT_THROW(parse_metric("hellinger"), InputError);
}

TEST(ClassMeans, DepthOneMeansAreTheLaws) {
  const auto cm = class_means(1, 1, 1.2, 0.1, ExactMeans{});
  for (auto a : kAlphabet) {
    const auto law = exact_law(GateSequence({a}), 1.2, 0.1);
    EXPECT_EQ(tv(cm[a], law), 0);
  }
  EXPECT_TRUE(cm.exact());
  EXPECT_EQ(cm.samples_per_class, 1u);
}

TEST(ClassMeans, DecouplingMakesMeansEqual) {
  const auto cm = class_means(2, 4, 0.0, 0.3, ExactMeans{});
  EXPECT_LT(tv(cm.means[0], cm.means[1]), 1e-12);
  EXPECT_LT(tv(cm.means[0], cm.means[2]), 1e-12);
}

TEST(ClassMeans, DepthTwoByEnumeration) {
  const double th = 0.8, l = 0.05;
  const auto cm = class_means(1, 2, th, l, ExactMeans{});
  std::vector<double> mean(4, 0.0);
  for (const char* s : {"G1,G1", "G1,G2", "G1,G3"}) {
    const auto law = exact_law(GateSequence::parse(s), th, l);
    for (std::size_t b = 0; b < 4; ++b) mean[b] += law[b] / 3;
  }
  for (std::size_t b = 0; b < 4; ++b) EXPECT_NEAR(cm[Gate::G1][b], mean[b], 1e-14);
  EXPECT_EQ(cm.samples_per_class, 3u);
}

TEST(ClassMeans, Errors) {
  EXPECT_THROW(class_means(0, 3, 1, 0, ExactMeans{}), InputError);
  EXPECT_THROW(class_means(4, 3, 1, 0, ExactMeans{}), InputError);
  EXPECT_THROW(class_means(1, 10, 1, 0, ExactMeans{}), CapacityError);
  EXPECT_NO_THROW(class_means(1, 10, 1, 0, MonteCarloMeans{10, 1}));
}

TEST(ClassMeans, MonteCarloWithinThreeStandardErrors) {
  t::Engine e(5);
  for (std::size_t k = 2; k <= 6; ++k) {
    const double th = t::uniform(e, 0.3, 2 * kPi - 0.3);
    const double l = t::uniform(e, 0, 0.3);
    const std::size_t pos = 1 + k / 2;
    const auto exact = class_means(pos, k, th, l, ExactMeans{});
    const auto mc = class_means(pos, k, th, l, MonteCarloMeans{4000, 100 + k});
    EXPECT_FALSE(mc.exact());
    for (std::size_t a = 0; a < kAlphabetSize; ++a)
      for (std::size_t b = 0; b < exact.means[a].size(); ++b)
        EXPECT_LE(std::abs(mc.means[a][b] - exact.means[a][b]), 3 * mc.std_errors[a][b] + 1e-15)
            << "k=" << k << " a=" << a << " b=" << b;
  }
}

TEST(PairwiseSeparation, Examples) {
  const auto u = GateSequence::parse("G2,G1");
  EXPECT_EQ(pairwise_separation(u, u, 1.0, 0.2, Metric::TV), 0);
  for (std::uint64_t i = 0; i < 9; ++i)
    EXPECT_LT(pairwise_separation(u, GateSequence::from_index(i, 2), 0.0, 0.2, Metric::TV), 1e-12);
  // P_G3 = [0, 1] and P_G2 = [1 - 1/2, 1/2] at theta = pi.
  EXPECT_NEAR(pairwise_separation(GateSequence::parse("G3"), GateSequence::parse("G2"), kPi, 0, Metric::TV),
              0.5, 1e-15);
  // At theta = pi/2 the G2 law is [0.75, 0.25] and G3 gives [0.5, 0.5].
  EXPECT_NEAR(pairwise_separation(GateSequence::parse("G3"), GateSequence::parse("G2"), kPi / 2, 0,
                                  Metric::TV),
              0.25, 1e-15);
  EXPECT_THROW(pairwise_separation(u, GateSequence::parse("G1"), 1.0, 0, Metric::TV), InputError);
}

TEST(MaxPairwiseTv, LowerBoundFromFirstOutcome) {
  // P(y1 = 1 | g1) = sin^2(phi/2) sin^2(theta/2) at lambda = 0, so sequences
  // starting with G1 and G3 are at least this far apart.
  const double s1 = std::sin(kPi / 16);
  for (int i = 1; i < 400; ++i) {
    const double th = 2 * kPi * i / 400.0;
    const double bound = (1 - s1 * s1) * std::pow(std::sin(th / 2), 2);
    EXPECT_GE(max_pairwise_tv(2, th, 0) + 1e-14, bound) << th;
  }
}

TEST(GoldenSection, FindsParabolaMinimum) {
  const double x = golden_section_minimize([](double v) { return (v - 1.3) * (v - 1.3); }, 0, 3, 1e-10);
  EXPECT_NEAR(x, 1.3, 1e-9);
}

TEST(BlindSpotScan, WindowErrors) {
  BlindSpotOptions o;
  o.window_lo = 2;
  o.window_hi = 1;
  EXPECT_THROW(blind_spot_scan(o), InputError);
  o.window_lo = 0.01;
  o.window_hi = 1;
  EXPECT_THROW(blind_spot_scan(o), InputError);
  o.window_lo = 1;
  o.window_hi = 2 * kPi;
  EXPECT_THROW(blind_spot_scan(o), InputError);
}

TEST(BlindSpotScan, FullWindowCurveAndRoots) {
  const auto scan = blind_spot_scan(BlindSpotOptions{});
  ASSERT_FALSE(scan.thetas.empty());
  EXPECT_EQ(scan.thetas.size(), scan.values.size());
  EXPECT_GE(scan.thetas.front(), 0.05);
  EXPECT_LE(scan.thetas.back(), 2 * kPi - 0.05);
  // The decoupling root at 0 must not be reported.
  for (double r : scan.roots) {
    EXPECT_GT(r, 0.05);
    EXPECT_LT(max_pairwise_tv(2, r, 0), 1e-8);
    for (std::size_t pos = 1; pos <= 2; ++pos) {
      const auto cm = class_means(pos, 2, r, 0, ExactMeans{});
      EXPECT_LT(tv(cm.means[0], cm.means[1]), 1e-8);
      EXPECT_LT(tv(cm.means[0], cm.means[2]), 1e-8);
      EXPECT_LT(tv(cm.means[1], cm.means[2]), 1e-8);
    }
  }
  // Every grid value respects the first-outcome bound.
  const double s1 = std::sin(kPi / 16);
  for (std::size_t i = 0; i < scan.thetas.size(); ++i)
    EXPECT_GE(scan.values[i] + 1e-14, (1 - s1 * s1) * std::pow(std::sin(scan.thetas[i] / 2), 2));
}

TEST(BlindSpotScan, DeterministicAcrossThreadCounts) {
  BlindSpotOptions a;
  a.step = 2 * kPi / 512;
  a.threads = 1;
  BlindSpotOptions b = a;
  b.threads = 4;
  const auto x = blind_spot_scan(a);
  const auto y = blind_spot_scan(b);
  EXPECT_EQ(x.values, y.values);
  EXPECT_EQ(x.roots, y.roots);
}

TEST(Envelope, Examples) {
  for (std::size_t k = 1; k <= 10; ++k) EXPECT_EQ(envelope_value(k, 0), 0);
  for (std::size_t k = 1; k <= 10; ++k) EXPECT_NEAR(envelope_value(k, kPi), 0, 1e-15);
  EXPECT_NEAR(envelope_value(2, kPi / 2), 0.25, 1e-15);
  EXPECT_THROW(envelope_value(0, 1), InputError);
}

TEST(Envelope, GridArgmaxMatchesPredictor) {
  const std::size_t n = 20001;
  const auto grid = linspace(0, kPi, n);
  const double step = kPi / (n - 1);
  for (std::size_t k = 1; k <= 15; ++k) {
    const auto curve = envelope(k, grid);
    EXPECT_LE(std::abs(curve.argmax() - theta_star(k)), step) << k;
  }
}

TEST(ThetaStar, Examples) {
  EXPECT_NEAR(theta_star(2), kPi / 2, 1e-12);
  // 2 asin(sqrt(2/9)) evaluated separately in double precision.
  EXPECT_NEAR(theta_star(7), 0.9817653565786227, 1e-12);
  for (std::size_t k = 1; k <= 50; ++k) EXPECT_LT(theta_star(k + 1), theta_star(k));
  EXPECT_LT(theta_star(100000), 0.01);
  EXPECT_THROW(theta_star(0), InputError);
}

TEST(MirrorSymmetry, ExactAtDepthOneOnly) {
  // At 2 pi - theta each Kraus operator becomes Z K_y(theta) up to sign.
  // Z fixes |0><0| and commutes with the diagonal K_y and with the noise, but
  // Z rx(phi) Z = rx(-phi), so the mirror flips the sign of every second gate
  // angle. One step is therefore symmetric; longer sequences are not.
  t::Engine e(6);
  for (int i = 0; i < 10; ++i) {
    const double th = t::angle(e);
    const double l = t::uniform(e, 0, 1);
    EXPECT_LT(mirror_deviation(1, th, l), 1e-12);
    EXPECT_LT(mirror_deviation(1, th, l, StepOrder::GateCoupleMeasureNoise), 1e-12);
  }
  EXPECT_GT(mirror_deviation(2, 1.0, 0.0), 1e-3);
  EXPECT_GT(mirror_deviation(7, theta_star(7), 0.0), 1e-3);
  // Decoupling and full mixing are symmetric trivially.
  EXPECT_LT(mirror_deviation(3, 0.0, 0.3), 1e-12);
  EXPECT_LT(mirror_deviation(3, 1.2, 1.0), 1e-12);
}

TEST(Wht, Examples) {
  const auto a = wht(std::vector<double>{1, 0, 0, 0});
  EXPECT_EQ(a, (std::vector<double>{1, 1, 1, 1}));
  EXPECT_EQ(wht(std::vector<double>{1, 1}), (std::vector<double>{2, 0}));
  EXPECT_THROW(wht(std::vector<double>{1, 2, 3}), InputError);
  EXPECT_THROW(wht(std::vector<double>{}), InputError);
}

TEST(Wht, AgainstDenseHadamard) {
  // H[i][j] = (-1)^popcount(i & j).
  t::Engine e(7);
  for (std::size_t k = 0; k <= 6; ++k) {
    const std::size_t n = std::size_t{1} << k;
    std::vector<double> x(n);
    for (auto& v : x) v = t::uniform(e, -1, 1);
    const auto fast = wht(x);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += (std::popcount(i & j) % 2 ? -1 : 1) * x[j];
      EXPECT_NEAR(fast[i], s, 1e-12);
    }
  }
}

TEST(Wht, InvolutionAndParseval) {
  t::Engine e(8);
  for (std::size_t k = 1; k <= 12; ++k) {
    const std::size_t n = std::size_t{1} << k;
    std::vector<double> x(n);
    for (auto& v : x) v = t::uniform(e, -1, 1);
    const auto y = wht(x);
    const auto z = wht(y);
    double nx = 0, ny = 0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(z[i], n * x[i], 1e-10);
      nx += x[i] * x[i];
      ny += y[i] * y[i];
    }
    EXPECT_NEAR(ny, n * nx, 1e-10 * n * nx);
  }
}

TEST(Gray, Examples) {
  const auto g = gray_reorder(std::vector<double>{0, 1, 2, 3});
  EXPECT_EQ(g, (std::vector<double>{0, 1, 3, 2}));
  EXPECT_THROW(gray_reorder(std::vector<double>{1, 2, 3}), InputError);
  EXPECT_THROW(gray_restore(std::vector<double>{1, 2, 3}), InputError);
}

TEST(Gray, BijectionAndAdjacency) {
  for (std::size_t k = 0; k <= 12; ++k) {
    const std::size_t n = std::size_t{1} << k;
    std::vector<double> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<double>(i);
    const auto g = gray_reorder(idx);
    EXPECT_EQ(gray_restore(g), idx);
    std::vector<bool> seen(n);
    for (double v : g) seen[static_cast<std::size_t>(v)] = true;
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto a = static_cast<std::uint64_t>(g[i]);
      const auto b = static_cast<std::uint64_t>(g[i + 1]);
      EXPECT_EQ(std::popcount(a ^ b), 1) << "k=" << k << " i=" << i;
    }
  }
}

TEST(CurveExport, CsvAndJson) {
  const std::vector<double> th = {0, 0.5};
  const std::vector<double> v = {0, 0.25};
  EXPECT_EQ(curve_to_csv(th, v), "theta,value\n0,0\n0.5,0.25\n");
  const auto j = curve_to_json(th, v);
  EXPECT_NE(j.find("0.25"), std::string::npos);
  EXPECT_THROW(curve_to_csv(th, std::vector<double>{1}), InputError);
}

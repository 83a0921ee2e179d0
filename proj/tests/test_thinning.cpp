#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "oracles/oracles.hpp"
#include "rdthin/initial_data.hpp"
#include "rdthin/stats.hpp"
#include "rdthin/thinning.hpp"

using namespace rdthin;

namespace {

TestFunction identity() { return {"x", [](double x) { return x; }, 4.0, 1.0}; }

/// Exact tail by brute-force subset enumeration.
double brute_tail(const ThinningSpec& spec, const TestFunction& f, double eps) {
  const double r = static_cast<double>(spec.r());
  double total = 0.0;
  for (const double b : spec.points) total += f(b);
  const double center = static_cast<double>(spec.s) / r * total / r;
  const auto subs = oracle::subsets(spec.r(), spec.s);
  std::size_t hits = 0;
  for (const auto& sub : subs) {
    double sum = 0.0;
    for (const auto i : sub) sum += f(spec.points[i]);
    hits += std::abs(sum / r - center) > eps;
  }
  return static_cast<double>(hits) / static_cast<double>(subs.size());
}

}  // namespace

TEST(Thinning, SpecValidation) {
  EXPECT_THROW(ThinningSpec({1, 1}, 1), std::invalid_argument);
  EXPECT_THROW(ThinningSpec({1, 2}, 3), std::invalid_argument);
}

TEST(Thinning, SampleExtremes) {
  RandomStream rng(1, 0, 0);
  const ThinningSpec full({1, 2, 3}, 3);
  const auto mu = sample_thinning(full, rng);
  EXPECT_EQ(mu.atoms(), (std::vector<double>{1, 2, 3}));
  for (const double w : mu.weights()) EXPECT_DOUBLE_EQ(w, 1.0 / 3);
  EXPECT_TRUE(sample_thinning(ThinningSpec({1, 2, 3}, 0), rng).empty());
}

TEST(Thinning, SubsetFrequenciesUniform) {
  const ThinningSpec spec({1, 2, 3, 4}, 2);
  std::map<std::vector<double>, std::uint64_t> counts;
  RandomStream rng(2, 0, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    const auto mu = sample_thinning(spec, rng);
    EXPECT_DOUBLE_EQ(mu.weights()[0], 0.25);
    ++counts[mu.atoms()];
  }
  ASSERT_EQ(counts.size(), 6u);
  const double sd = std::sqrt(draws * (1.0 / 6) * (5.0 / 6));
  for (const auto& kv : counts) EXPECT_NEAR(kv.second, draws / 6.0, 3 * sd);
}

TEST(Thinning, Pairing) {
  const auto c = make_test_function("ramp:1e-9");
  EXPECT_NEAR(pairing(DiscreteMeasure({1, 2}, {0.3, 0.2}), c), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(pairing(DiscreteMeasure({0, 1}, {0.5, 0.5}), identity()), 0.5);
  const auto q = DiscreteMeasure::uniform(quantile_points(4, InitialDensity::uniform01()), 0.25);
  EXPECT_DOUBLE_EQ(pairing(q, identity()), 0.5);
}

TEST(Thinning, TestFunctions) {
  const auto ind = make_test_function("indicator:0.5");
  EXPECT_EQ(ind(0.5), 1.0);
  EXPECT_EQ(ind(0.6), 0.0);
  EXPECT_FALSE(ind.bl_norm().has_value());
  const auto tent = make_test_function("tent:1");
  EXPECT_EQ(tent(1.0), 1.0);
  EXPECT_EQ(*tent.bl_norm(), 2.0);
  const auto cs = make_test_function("cos:2");
  EXPECT_NEAR(cs(0.25), -1.0, 1e-15);
  EXPECT_NEAR(cs(0.5), 1.0, 1e-15);
  for (const auto& f : {ind, tent, cs, make_test_function("ramp:0.3")}) {
    for (int i = 0; i < 100; ++i) EXPECT_LE(std::abs(f(i * 0.037)), f.sup_norm);
  }
  EXPECT_THROW(make_test_function("wiggle:1"), std::invalid_argument);
}

TEST(RevolvingDoor, EnumeratesEachSubsetOnceWithSingleSwaps) {
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::size_t t = 1; t < n; ++t) {
      RevolvingDoor door(n, t);
      std::set<std::vector<std::size_t>> seen;
      auto cur = door.current();
      seen.insert(cur);
      std::size_t out = 0, in = 0;
      while (door.next(out, in)) {
        const auto nxt = door.current();
        ASSERT_TRUE(std::is_sorted(nxt.begin(), nxt.end()));
        std::set<std::size_t> a(cur.begin(), cur.end()), b(nxt.begin(), nxt.end());
        ASSERT_TRUE(a.count(out) && !a.count(in)) << n << "," << t;
        a.erase(out);
        a.insert(in);
        ASSERT_EQ(a, b) << n << "," << t;
        ASSERT_TRUE(seen.insert(nxt).second) << "repeat at " << n << "," << t;
        cur = nxt;
      }
      EXPECT_EQ(seen.size(), static_cast<std::size_t>(binomial(n, t))) << n << "," << t;
    }
  }
}

TEST(Thinning, ExactTailExamples) {
  const ThinningSpec spec({1, 2, 3, 4}, 2);
  const auto est = deviation_tail_exact(spec, identity(), 0.4);
  EXPECT_EQ(est.trials, 6u);
  EXPECT_EQ(est.exceed, 2u);
  const TestFunction constant{"c", [](double) { return 0.7; }, 0.7, 0.0};
  EXPECT_EQ(deviation_tail_exact(spec, constant, 1e-9).exceed, 0u);
  EXPECT_EQ(deviation_tail_exact(ThinningSpec({1, 2, 3, 4}, 4), identity(), 1e-9).exceed, 0u);
  EXPECT_EQ(deviation_tail_exact(ThinningSpec({1, 2, 3, 4}, 0), identity(), 1e-9).exceed, 0u);
  EXPECT_THROW(deviation_tail_exact(ThinningSpec(quantile_points(40, InitialDensity::uniform01()), 20),
                                    identity(), 0.1),
               std::length_error);
}

TEST(Thinning, ExactTailMatchesBruteForce) {
  for (const std::size_t r : {5u, 8u, 12u}) {
    const ThinningSpec base(quantile_points(r, InitialDensity::exponential(1.0)), 0);
    for (std::size_t s = 0; s <= r; ++s) {
      const ThinningSpec spec(base.points, s);
      for (const auto& name : {"indicator:0.7", "cos:1", "ramp:0.5"}) {
        const auto f = make_test_function(name);
        for (const double eps : {0.01, 0.05, 0.2}) {
          EXPECT_DOUBLE_EQ(deviation_tail_exact(spec, f, eps).probability(), brute_tail(spec, f, eps))
              << r << "," << s << "," << name << "," << eps;
        }
      }
    }
  }
}

TEST(Thinning, MonteCarloAgreesWithExact) {
  const ThinningSpec spec(quantile_points(16, InitialDensity::uniform01()), 7);
  const auto f = make_test_function("indicator:0.4");
  const double exact = deviation_tail_exact(spec, f, 0.05).probability();
  RandomStream rng(3, 0, 0);
  const auto mc = deviation_tail(spec, f, 0.05, 100000, rng);
  EXPECT_NEAR(mc.probability(), exact, 5 * std::sqrt(exact * (1 - exact) / 1e5));
}

TEST(Thinning, Unbiasedness) {
  const ThinningSpec spec(quantile_points(30, InitialDensity::exponential(1.0)), 11);
  const auto f = make_test_function("cos:1");
  double center = 0.0;
  for (const double b : spec.points) center += f(b);
  center *= 11.0 / 30 / 30;
  RandomStream rng(4, 0, 0);
  double sum = 0.0, sq = 0.0;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) {
    const double v = pairing(sample_thinning(spec, rng), f);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt((sq / reps - mean * mean) / reps);
  EXPECT_NEAR(mean, center, 4 * sd);
}

TEST(Thinning, ExactInclusionProbability) {
  // Count each point's appearances over the full enumeration.
  const std::size_t r = 9, s = 4;
  RevolvingDoor door(r, s);
  std::vector<std::size_t> hits(r, 0);
  std::size_t total = 0, out = 0, in = 0;
  do {
    for (const auto i : door.current()) ++hits[i];
    ++total;
  } while (door.next(out, in));
  for (const auto h : hits) EXPECT_EQ(h * r, total * s);
}

TEST(Maurey, Values) {
  EXPECT_NEAR(maurey_bound(64, 1.0, 1.0), 2 * std::exp(-1.0), 1e-15);
  EXPECT_EQ(maurey_bound(64, 1e-6, 1.0), 1.0);
  const double a = maurey_bound_raw(50, 0.3, 1.0) / 2, b = maurey_bound_raw(100, 0.3, 1.0) / 2;
  EXPECT_NEAR(b, a * a, 1e-15);
  EXPECT_THROW(maurey_bound(0, 1.0, 1.0), std::invalid_argument);
}

TEST(Maurey, ExactTailsRespectBound) {
  for (std::size_t r = 4; r <= 20; r += 4) {
    const auto pts = quantile_points(r, InitialDensity::uniform01());
    for (std::size_t s = 1; s < r; s += 3) {
      const ThinningSpec spec(pts, s);
      for (const auto& name : {"indicator:0.5", "ramp:0.25", "cos:1", "tent:0.5"}) {
        const auto f = make_test_function(name);
        for (const double eps : {0.05, 0.1, 0.2, 0.4}) {
          EXPECT_LE(deviation_tail_exact(spec, f, eps).probability(), maurey_bound(r, eps, f.sup_norm));
        }
      }
    }
  }
}

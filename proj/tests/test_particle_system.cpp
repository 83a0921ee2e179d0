#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "oracles/oracles.hpp"
#include "rdthin/initial_data.hpp"
#include "rdthin/metrics.hpp"
#include "rdthin/particle_system.hpp"
#include "rdthin/rank_set.hpp"
#include "rdthin/stats.hpp"
#include "rdthin/thinning.hpp"

using namespace rdthin;

TEST(RankSet, SelectRankErase) {
  RankSet s(10);
  EXPECT_EQ(s.size(), 10u);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(s.select(k), k);
  s.erase(3);
  s.erase(0);
  s.erase(9);
  EXPECT_EQ(s.size(), 7u);
  const std::vector<std::size_t> left{1, 2, 4, 5, 6, 7, 8};
  for (std::size_t k = 0; k < left.size(); ++k) {
    EXPECT_EQ(s.select(k), left[k]);
    EXPECT_EQ(s.rank(left[k]), k);
  }
  EXPECT_THROW(s.erase(3), std::out_of_range);
  EXPECT_THROW(s.select(7), std::out_of_range);
}

TEST(RankSet, RandomAgainstStdSet) {
  RandomStream rng(4, 0, 0);
  for (const std::size_t n : {1u, 2u, 7u, 64u, 1000u}) {
    RankSet s(n);
    std::set<std::size_t> ref;
    for (std::size_t i = 0; i < n; ++i) ref.insert(i);
    while (!ref.empty()) {
      const std::size_t k = rng.uniform_index(ref.size());
      const std::size_t want = *std::next(ref.begin(), static_cast<std::ptrdiff_t>(k));
      ASSERT_EQ(s.select(k), want);
      s.erase(want);
      ref.erase(want);
    }
  }
}

TEST(Simulate, TwoParticles) {
  RandomStream rng(1, 0, 0);
  const auto tr = simulate({0.25, 0.75}, rng);
  ASSERT_EQ(tr.events(), 1u);
  EXPECT_EQ(tr.hit_times[0], 0.25);
  EXPECT_EQ(tr.hit_index[0], 0u);
  EXPECT_EQ(tr.companion_index[0], 1u);
}

TEST(Simulate, FourParticlesBranches) {
  const std::vector<double> pos{0.125, 0.375, 0.625, 0.875};
  int second_at_0625 = 0;
  const int runs = 30000;
  for (int i = 0; i < runs; ++i) {
    RandomStream rng(2, 0, static_cast<std::uint64_t>(i));
    const auto tr = simulate(pos, rng);
    ASSERT_EQ(tr.hit_times[0], 0.125);
    ASSERT_TRUE(tr.hit_times[1] == 0.375 || tr.hit_times[1] == 0.625);
    EXPECT_EQ(tr.hit_times[1] == 0.625, tr.companion_index[0] == 1u);
    second_at_0625 += tr.hit_times[1] == 0.625;
  }
  // Three equally likely companions, one of which is index 1.
  EXPECT_NEAR(second_at_0625 / double(runs), 1.0 / 3, 4 * std::sqrt(2.0 / 9 / runs));
}

TEST(Simulate, RejectsBadInput) {
  RandomStream rng(1, 0, 0);
  EXPECT_THROW(simulate({0.1, 0.2, 0.3}, rng), std::invalid_argument);
  EXPECT_THROW(simulate({0.1, 0.1}, rng), std::invalid_argument);
  EXPECT_THROW(simulate({0.0, 0.1}, rng), std::invalid_argument);
  EXPECT_THROW(simulate({0.3, 0.1}, rng), std::invalid_argument);
  EXPECT_THROW(simulate({}, rng), std::invalid_argument);
}

TEST(Simulate, ConservationAtScale) {
  RandomStream rng(3, 0, 0);
  const auto tr = simulate(quantile_init(1000, InitialDensity::uniform01()), rng);
  EXPECT_EQ(tr.events(), 500u);
  std::vector<int> seen(1000, 0);
  for (std::size_t k = 0; k < tr.events(); ++k) {
    ++seen[tr.hit_index[k]];
    ++seen[tr.companion_index[k]];
    if (k > 0) {
      EXPECT_GT(tr.hit_times[k], tr.hit_times[k - 1]);
    }
    // The hitter is the leftmost survivor: its initial position is the time.
    EXPECT_EQ(tr.initial_positions[tr.hit_index[k]], tr.hit_times[k]);
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  EXPECT_EQ(loss_path(tr).terminal(), 0.5);
}

TEST(Simulate, DeterministicGivenStream) {
  const auto pos = quantile_init(200, InitialDensity::exponential(1.0));
  RandomStream a(11, 2, 5), b(11, 2, 5);
  const auto ta = simulate(pos, a), tb = simulate(pos, b);
  EXPECT_EQ(ta.companion_index, tb.companion_index);
  EXPECT_EQ(ta.hit_times, tb.hit_times);
}

TEST(LossPath, Examples) {
  const LossPath a({0.25}, 2);
  EXPECT_EQ(a(0.2), 0.0);
  EXPECT_EQ(a(0.25), 0.5);
  EXPECT_EQ(a.left_limit(0.25), 0.0);
  const LossPath b({0.1, 0.3}, 4);
  EXPECT_EQ(b(0.2), 0.25);
  RandomStream rng(5, 0, 0);
  const auto tr = simulate(quantile_init(100, InitialDensity::uniform01()), rng);
  EXPECT_EQ(loss_path(tr)(1e9), 0.5);
}

TEST(SupLossDeviation, TwoParticleUniform) {
  const KineticSolution sol(InitialDensity::uniform01());
  const LossPath p({0.25}, 2);
  EXPECT_DOUBLE_EQ(sup_loss_deviation(p, sol), 0.28125);
}

TEST(SupLossDeviation, MatchesDenseGridOracle) {
  for (const auto& d : {InitialDensity::uniform01(), InitialDensity::exponential(2.0)}) {
    const KineticSolution sol(d);
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
      RandomStream rng(6, 0, rep);
      const auto tr = simulate(quantile_init(40, d), rng);
      const double got = sup_loss_deviation(loss_path(tr), sol);
      const double want = oracle::dense_sup_deviation(
          tr.hit_times, 40, [&](double t) { return sol.loss(t); }, 30.0, 200000);
      // The grid oracle can only undershoot; the jump values are exact.
      EXPECT_NEAR(got, want, 1e-9);
    }
  }
}

TEST(Snapshot, ExamplesAndBookkeeping) {
  const std::vector<double> pos{0.125, 0.375, 0.625, 0.875};
  RandomStream rng(7, 0, 0);
  const auto tr = simulate(pos, rng);
  const auto s0 = snapshot_empirical(tr, 0.0);
  EXPECT_EQ(s0.atoms(), pos);
  EXPECT_DOUBLE_EQ(s0.mass(), 1.0);
  const auto s2 = snapshot_empirical(tr, 0.2);
  EXPECT_EQ(s2.size(), 2u);
  EXPECT_DOUBLE_EQ(s2.mass(), 0.5);
  EXPECT_TRUE(snapshot_empirical(tr, std::nextafter(tr.hit_times.back(), 2.0)).empty());

  RandomStream rng2(7, 0, 1);
  const auto big = simulate(quantile_init(300, InitialDensity::exponential(1.0)), rng2);
  const auto removal = removal_times(big);
  const LossPath lp(big);
  for (int i = 0; i < 200; ++i) {
    const double t = i * 0.03;
    EXPECT_NEAR(snapshot_empirical(big, removal, t).mass() + 2 * lp(t), 1.0, 1e-12);
  }
  for (const double tau : big.hit_times) {
    EXPECT_NEAR(snapshot_empirical(big, removal, tau).mass() + 2 * lp(tau), 1.0, 1e-12);
  }
}

TEST(Snapshot, TrajectoryCsv) {
  RandomStream rng(8, 0, 0);
  const auto tr = simulate({0.25, 0.75}, rng);
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  EXPECT_EQ(os.str(), "event_index,tau,hit_index,companion_index\n0,0.25,0,1\n");
}

TEST(Exchangeability, FourParticlesFirstEvent) {
  const std::vector<double> pos{0.125, 0.375, 0.625, 0.875};
  // Exact law of the surviving pair after the first event by enumeration.
  std::map<std::pair<std::size_t, std::size_t>, double> exact;
  for (const auto& b : oracle::particle_branches(pos)) {
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < 4; ++i) {
      if (!(b.removal[i] <= pos[0])) alive.push_back(i);
    }
    exact[{alive[0], alive[1]}] += b.probability;
  }
  ASSERT_EQ(exact.size(), 3u);
  for (const auto& [pair, p] : exact) EXPECT_NEAR(p, 1.0 / 3, 1e-15);

  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    RandomStream rng(9, 0, i);
    const auto tr = simulate(pos, rng);
    std::vector<std::size_t> alive;
    for (std::size_t j = 1; j < 4; ++j) {
      if (j != tr.companion_index[0]) alive.push_back(j);
    }
    ++counts[{alive[0], alive[1]}];
  }
  std::vector<std::uint64_t> obs;
  std::vector<double> probs;
  for (const auto& [pair, p] : exact) {
    obs.push_back(counts[pair]);
    probs.push_back(p);
  }
  EXPECT_GT(chi_square_test(obs, probs).p_value, 0.001);
}

TEST(ThinningRepresentation, SixParticlesConditionalUniformity) {
  // Survivors at time t form a subset of the r(t) particles with a_i > t.
  // Given its size, the subset must be uniform, i.e. a uniform thinning.
  const auto pos = quantile_init(6, InitialDensity::uniform01());
  const auto branches = oracle::particle_branches(pos);
  ASSERT_EQ(branches.size(), 15u);
  for (double t = 0.0; t < 1.0; t += 1.0 / 24) {
    std::vector<std::size_t> reds;
    for (std::size_t i = 0; i < 6; ++i) {
      if (pos[i] > t) reds.push_back(i);
    }
    std::map<std::size_t, std::map<std::vector<std::size_t>, double>> by_size;
    for (const auto& b : branches) {
      std::vector<std::size_t> alive;
      for (const std::size_t i : reds) {
        if (b.removal[i] > t) alive.push_back(i);
      }
      by_size[alive.size()][alive] += b.probability;
    }
    for (const auto& [s, law] : by_size) {
      double total = 0.0;
      for (const auto& kv : law) total += kv.second;
      const double count = binomial(reds.size(), s);
      ASSERT_EQ(law.size(), static_cast<std::size_t>(count)) << "t=" << t << " s=" << s;
      for (const auto& kv : law) EXPECT_NEAR(kv.second / total, 1.0 / count, 1e-12);

      // The thinning sampler draws the same conditional law.
      if (s == 0 || s == reds.size()) continue;
      std::vector<double> red_pos;
      for (const std::size_t i : reds) red_pos.push_back(pos[i]);
      const ThinningSpec spec(red_pos, s);
      std::map<std::vector<double>, std::uint64_t> counts;
      for (std::uint64_t k = 0; k < 20000; ++k) {
        RandomStream rng(10, static_cast<std::uint32_t>(s), k);
        ++counts[sample_thinning(spec, rng).atoms()];
      }
      std::vector<std::uint64_t> obs;
      std::vector<double> probs;
      for (const auto& kv : law) {
        std::vector<double> atoms;
        for (const std::size_t i : kv.first) atoms.push_back(pos[i]);
        obs.push_back(counts[atoms]);
        probs.push_back(kv.second / total);
      }
      EXPECT_GT(chi_square_test(obs, probs).p_value, 0.001) << "t=" << t << " s=" << s;
    }
  }
}

TEST(LossEvolution, ShiftedSnapshotWithinTwiceLossIncrement) {
  for (const auto& d : {InitialDensity::uniform01(), InitialDensity::exponential(1.5)}) {
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
      RandomStream rng(12, 0, rep);
      const std::size_t n = 2 * (1 + rng.uniform_index(60));
      const auto tr = simulate(quantile_init(n, d), rng);
      const auto removal = removal_times(tr);
      const LossPath lp(tr);
      for (int k = 0; k < 10; ++k) {
        const double t0 = rng.uniform01() * 1.2;
        const double t = t0 + rng.uniform01() * 0.5;
        const auto now = snapshot_empirical(tr, removal, t);
        const auto then = shift_pushforward(snapshot_empirical(tr, removal, t0), t - t0);
        ASSERT_LE(bl_distance(now, then), 2 * (lp(t) - lp(t0)) + 1e-12);
      }
    }
  }
}

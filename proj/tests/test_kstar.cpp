#include "mclab/kstar.hpp"

#include "frozen_values.hpp"
#include "naive.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mclab;

TEST(KStar, SpecValues) {
  const auto r = kstar_upper("10", "10", 9, 100);
  EXPECT_EQ(r.value, frozen::kKstar10_10L9);
  // Ties at length 9: EMIT1,EMIT0,HALT is found before RDC,RDC,HALT.
  ASSERT_TRUE(r.program);
  ASSERT_EQ(r.program->size(), 9u);
  const auto w = run(MachineKind::TwicePrefix, *r.program, "10", Budget{});
  EXPECT_EQ(w.status, RunStatus::Halted);
  EXPECT_EQ(w.output, "10");
  EXPECT_EQ(w.consumed_condition, r.k);
  const auto rdc = run(MachineKind::TwicePrefix, "011011000", "10", Budget{});
  EXPECT_EQ(rdc.output, "10");
  EXPECT_EQ(rdc.consumed_condition, 2u);
  for (const std::string x : {"", "0", "1", "10"}) {
    const auto e = kstar_upper("", x, 3, 100);
    EXPECT_EQ(e.value, 3u);
    EXPECT_EQ(e.k, 0u);
  }
}

TEST(KStar, FrozenL9) {
  Estimator est(9, 10000);
  EXPECT_EQ(kstar_profile(est, "0", "01"), frozen::kProfile0_01L9);
  EXPECT_EQ(kstar_upper(est, "0", "0").value, frozen::kKstar0_0L9);
  EXPECT_EQ(est.k("0", "").value, frozen::kKcond0_epsL9);
  EXPECT_EQ(kstar_upper(est, "0", "").value, frozen::kKstar0_epsL9);
  EXPECT_EQ(est.k("0").value, frozen::kK0L9);
}

TEST(KStar, ProfileExamples) {
  Estimator est(12, 10000);
  const auto p = kstar_profile(est, "10", "10");
  ASSERT_EQ(p.size(), 3u);
  EXPECT_TRUE(profile_nonincreasing(p));
  const auto e = kstar_profile(est, "", "0110");
  for (const auto& v : e) EXPECT_EQ(v, e.front());
}

TEST(KStar, Lemma8Examples) {
  Estimator est(12, 10000);
  const auto empty = lemma8_report(est, "", "0101");
  EXPECT_TRUE(all_asserted_pass(empty));
  EXPECT_EQ(empty[0].lhs, Quantity(3));
  EXPECT_EQ(empty[1].lhs, Quantity(3));
  const auto r = lemma8_report(est, "0", "0");
  EXPECT_TRUE(all_asserted_pass(r));
  EXPECT_LE(*kstar_upper(est, "0", "0").value, 6u);
  EXPECT_EQ(est.k("0", "").value, est.k("0").value);
  EXPECT_EQ(kstar_upper(est, "0", "").value, est.k("0").value);
}

TEST(KStar, CountOrder) {
  EXPECT_TRUE(count_le(std::nullopt, std::nullopt));
  EXPECT_TRUE(count_le(std::size_t{3}, std::nullopt));
  EXPECT_FALSE(count_le(std::nullopt, std::size_t{3}));
  EXPECT_TRUE(profile_nonincreasing({std::nullopt, std::size_t{9}, std::size_t{6}}));
  EXPECT_FALSE(profile_nonincreasing({std::size_t{6}, std::nullopt}));
}

// 50 seeded pairs: profile nonincreasing; K(x|y) <= K_*(x|y*) <= K(x).
TEST(KStarProperty, MonotoneAndSandwich) {
  Estimator est(12, 10000);
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    const std::string y = naive::random_bits(rng, rng() % 4);
    const std::string x = naive::random_bits(rng, rng() % 5);
    EXPECT_TRUE(profile_nonincreasing(kstar_profile(est, y, x))) << y << "|" << x;
    const auto k_cond = est.k(y, x).value;
    const auto k_star = kstar_upper(est, y, x).value;
    EXPECT_TRUE(count_le(k_cond, k_star)) << y << "|" << x;
    EXPECT_TRUE(count_le(k_star, est.k(y).value)) << y << "|" << x;
    EXPECT_TRUE(all_asserted_pass(lemma8_report(est, y, x)));
  }
}

// K_* agrees with a brute-force search over twice-prefix halting programs on
// every condition prefix.
TEST(KStarProperty, AgreesWithNaive) {
  std::mt19937_64 rng(29);
  Estimator est(9, 10000);
  for (int i = 0; i < 20; ++i) {
    const std::string x = naive::random_bits(rng, rng() % 4);
    const std::string y = naive::random_bits(rng, rng() % 3);
    const auto set = naive::halting(naive::kTwice, x, 9);
    EXPECT_EQ(kstar_upper(est, y, x).value, naive::shortest(set, y)) << y << "|" << x;
  }
}

TEST(KCorrect, AllRequirementsL9) {
  const auto reports = kcorrect_check(9, 10000, {"", "0", "1", "10", "01", "110"});
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.name << " " << r.note;
}

TEST(KCorrect, TripleSetClosure) {
  const TripleSet E(9, 10000, {"", "1", "10", "100"});
  std::size_t seen = 0;
  E.for_each([&](std::string_view p, std::string_view x, std::string_view y) {
    if (p.size() + 1 <= 9 && x.size() < 2) {
      ++seen;
      EXPECT_TRUE(E.contains(std::string(p) + "1", std::string(x) + (x.empty() ? "1" : "0"), y));
    }
  });
  EXPECT_GT(seen, 0u);
  Estimator est(9, 10000);
  EXPECT_EQ(E.complexity("10", "10"), kstar_upper(est, "10", "10").value);
}

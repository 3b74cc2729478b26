#include "mclab/refmachine.hpp"

#include "naive.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mclab;

namespace {

naive::Kind to_naive(MachineKind k) {
  switch (k) {
    case MachineKind::Prefix: return naive::kPrefix;
    case MachineKind::Monotone: return naive::kMonotone;
    case MachineKind::TwicePrefix: return naive::kTwice;
    case MachineKind::CondLengthAware: return naive::kLenAware;
  }
  return naive::kPrefix;
}

std::optional<std::string_view> cond_for(MachineKind k, const std::string& c) {
  if (uses_condition(k)) return std::string_view(c);
  return std::nullopt;
}

}  // namespace

TEST(RefMachine, PrefixEmitOne) {
  const auto r = run(MachineKind::Prefix, "010000", std::nullopt, Budget{});
  EXPECT_EQ(r.status, RunStatus::Halted);
  EXPECT_EQ(r.output, "1");
  EXPECT_EQ(r.consumed_program, 6u);
}

TEST(RefMachine, MonotoneDupTwice) {
  const auto r = run(MachineKind::Monotone, "001100100", std::nullopt, Budget{});
  EXPECT_EQ(r.status, RunStatus::ProgramExhausted);
  EXPECT_EQ(r.output, "0000");
}

TEST(RefMachine, TwicePrefixCopiesCondition) {
  const auto r = run(MachineKind::TwicePrefix, "011011000", "10", Budget{});
  EXPECT_EQ(r.status, RunStatus::Halted);
  EXPECT_EQ(r.output, "10");
  EXPECT_EQ(r.consumed_condition, 2u);
}

TEST(RefMachine, ConditionOpcodesAbortOnPlainMachines) {
  EXPECT_EQ(run(MachineKind::Prefix, "011000", std::nullopt, Budget{}).status, RunStatus::Aborted);
  EXPECT_EQ(run(MachineKind::Monotone, "101", std::nullopt, Budget{}).status, RunStatus::Aborted);
  EXPECT_EQ(run(MachineKind::TwicePrefix, "110000", "", Budget{}).status, RunStatus::Aborted);
}

TEST(RefMachine, ConditionExhausted) {
  EXPECT_EQ(run(MachineKind::TwicePrefix, "011011", "1", Budget{}).status, RunStatus::CondExhausted);
}

TEST(RefMachine, BranchSkipsAtSentinel) {
  // BRE with the condition already consumed skips the ABT.
  const auto a = run(MachineKind::CondLengthAware, "011110111010000", "1", Budget{});
  EXPECT_EQ(a.status, RunStatus::Halted);
  EXPECT_EQ(a.output, "11");
  // Not at the sentinel: ABT runs.
  EXPECT_EQ(run(MachineKind::CondLengthAware, "110111000", "1", Budget{}).status, RunStatus::Aborted);
}

TEST(RefMachine, DupCostsBufferLength) {
  const auto r = run(MachineKind::Prefix, "010100100000", std::nullopt, Budget{});
  EXPECT_EQ(r.output, "1111");
  EXPECT_EQ(r.steps, 1u + 1u + 2u + 1u);
  EXPECT_EQ(run(MachineKind::Prefix, "100000", std::nullopt, Budget{}).steps, 2u);
  EXPECT_EQ(run(MachineKind::Prefix, "010100100000", std::nullopt, Budget{4, 100}).status, RunStatus::StepLimit);
}

TEST(RefMachine, OutputLimit) {
  EXPECT_EQ(run(MachineKind::Prefix, "010100100000", std::nullopt, Budget{100, 3}).status, RunStatus::OutputLimit);
}

TEST(RefMachine, RejectsBadArguments) {
  EXPECT_THROW(run(MachineKind::TwicePrefix, "000", std::nullopt, Budget{}), std::invalid_argument);
  EXPECT_THROW(run(MachineKind::Prefix, "000", "1", Budget{}), std::invalid_argument);
  EXPECT_THROW(run(MachineKind::Prefix, "0a0", std::nullopt, Budget{}), std::invalid_argument);
  EXPECT_THROW(run(MachineKind::Prefix, "000", std::nullopt, Budget{0, 1}), std::invalid_argument);
}

TEST(RefMachine, MinimalConsumedPrefix) {
  EXPECT_EQ(minimal_consumed_prefix("001000", "0"), 3u);
  EXPECT_EQ(minimal_consumed_prefix("100001", "0"), 6u);
  EXPECT_EQ(minimal_consumed_prefix("000000", "0"), std::nullopt);
  EXPECT_EQ(minimal_consumed_prefix("010", "0"), std::nullopt);
  EXPECT_EQ(minimal_consumed_prefix("001100100", "000"), 9u);
}

TEST(RefMachine, KindNames) {
  for (auto k : {MachineKind::Prefix, MachineKind::Monotone, MachineKind::TwicePrefix, MachineKind::CondLengthAware})
    EXPECT_EQ(machine_kind_from_string(to_string(k)), k);
  EXPECT_THROW(machine_kind_from_string("Universal"), FormatError);
}

// Random programs and conditions: the incremental machine agrees with the
// naive whole-tape interpreter on status, output, consumption and steps.
TEST(RefMachineProperty, AgreesWithNaiveInterpreter) {
  std::mt19937_64 rng(7);
  const MachineKind kinds[] = {MachineKind::Prefix, MachineKind::Monotone, MachineKind::TwicePrefix,
                               MachineKind::CondLengthAware};
  for (int i = 0; i < 4000; ++i) {
    const MachineKind kind = kinds[rng() % 4];
    const std::string tape = naive::random_bits(rng, 3 * (rng() % 9));
    const std::string cond = naive::random_bits(rng, rng() % 4);
    const std::size_t steps = 1 + rng() % 20;
    const auto got = run(kind, tape, cond_for(kind, cond), Budget{steps, 10000});
    const auto want = naive::run(to_naive(kind), tape, cond, steps);
    ASSERT_EQ(std::string(to_string(got.status)), want.status) << tape << " | " << cond;
    ASSERT_EQ(got.output, want.out) << tape;
    ASSERT_EQ(got.consumed_program, want.used) << tape;
    ASSERT_EQ(got.steps, want.steps) << tape;
    if (uses_condition(kind)) ASSERT_EQ(got.consumed_condition, want.k);
  }
}

// Appending bits after a halt never changes the outcome.
TEST(RefMachineProperty, PaddingAfterHaltIsIgnored) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::string tape = naive::random_bits(rng, 3 * (1 + rng() % 6));
    const auto a = run(MachineKind::Prefix, tape, std::nullopt, Budget{});
    if (a.status != RunStatus::Halted) continue;
    const auto b = run(MachineKind::Prefix, tape + naive::random_bits(rng, 3 * (1 + rng() % 4)), std::nullopt, Budget{});
    ASSERT_EQ(b.status, RunStatus::Halted);
    ASSERT_EQ(b.output, a.output);
    ASSERT_EQ(b.consumed_program, a.consumed_program);
  }
}

// Monotone output only grows: every prefix of the tape yields a prefix of
// the longer tape's output.
TEST(RefMachineProperty, MonotoneOutputExtends) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 2000; ++i) {
    const std::string tape = naive::random_bits(rng, 3 * (1 + rng() % 8));
    std::string prev;
    for (std::size_t cut = 0; cut <= tape.size(); cut += 3) {
      const auto r = run(MachineKind::Monotone, std::string_view(tape).substr(0, cut), std::nullopt, Budget{});
      ASSERT_TRUE(is_prefix(prev, r.output)) << tape;
      prev = r.output;
      if (r.status != RunStatus::ProgramExhausted) break;
    }
  }
}

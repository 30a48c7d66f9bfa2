#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "wirenn/argmax/chain.hpp"
#include "wirenn/argmax/ternary.hpp"
#include "wirenn/error.hpp"
#include "wirenn/oracles/argmax_oracle.hpp"

using namespace wirenn;
using argmax::OptLevel;

namespace {

constexpr OptLevel kLevels[] = {OptLevel::base, OptLevel::opt1, OptLevel::opt2, OptLevel::opt1_opt2};

std::uint64_t closed_form(int n, int m) {
  std::uint64_t v = static_cast<std::uint64_t>(n);
  for (int i = 1; i < n; ++i) v *= static_cast<std::uint64_t>(m);
  return v;
}

}  // namespace

TEST(ArgmaxTable, SingleValueIsOneWildcardEntry) {
  for (auto lv : kLevels) {
    const auto t = argmax::generate_table(1, 4, lv);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.entries()[0].key[0].care, 0u);
    EXPECT_EQ(t.entries()[0].winner, 0u);
  }
}

TEST(ArgmaxTable, ReverseEncodingOneBit) {
  const auto t = argmax::generate_table(3, 1, OptLevel::opt1_opt2);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(argmax::generate_table(3, 1, OptLevel::base).size(), 8u);
}

TEST(ArgmaxTable, ThreeByFourHas48EntriesAndPicksFirstMaximum) {
  const auto t = argmax::generate_table(3, 4, OptLevel::opt1_opt2);
  EXPECT_EQ(t.size(), 48u);
  const std::uint32_t v[] = {5, 3, 5};
  const int order[] = {0, 1, 2};
  EXPECT_EQ(t.lookup(v), 0u);
  EXPECT_EQ(oracles::brute_force_argmax(v, order), 0);
}

TEST(ArgmaxTable, AllEqualGoesToFirstInTieOrder) {
  const std::vector<int> order{2, 0, 1};
  const auto t = argmax::generate_table(3, 4, order, OptLevel::opt1_opt2);
  const std::uint32_t v[] = {0, 0, 0};
  EXPECT_EQ(t.lookup(v), 2u);
  const std::uint32_t w[] = {7, 7, 7};
  EXPECT_EQ(t.lookup(w), 2u);
}

TEST(ArgmaxTable, StrictMaximumAtIndexZero) {
  const auto t = argmax::generate_table(2, 5, OptLevel::opt1_opt2);
  const std::uint32_t v[] = {31, 0};
  EXPECT_EQ(t.lookup(v), 0u);
}

TEST(ArgmaxTable, ClosedFormForOpt1Opt2) {
  for (int n = 1; n <= 5; ++n)
    for (int m = 1; m <= 6; ++m) {
      EXPECT_EQ(argmax::count_entries(n, m, OptLevel::opt1_opt2), closed_form(n, m)) << n << "," << m;
      EXPECT_EQ(argmax::generate_table(n, m, OptLevel::opt1_opt2).size(), closed_form(n, m)) << n << "," << m;
    }
}

TEST(ArgmaxTable, GeneratedSizeMatchesCountAtEveryLevel) {
  for (int n = 1; n <= 4; ++n)
    for (int m = 1; m <= 5; ++m)
      for (auto lv : kLevels) EXPECT_EQ(argmax::generate_table(n, m, lv).size(), argmax::count_entries(n, m, lv));
}

TEST(ArgmaxTable, CountsMatchLiteralRecursion) {
  for (int n = 1; n <= 6; ++n)
    for (int m = 1; m <= 6; ++m)
      for (auto lv : kLevels) EXPECT_EQ(argmax::count_entries(n, m, lv), oracles::recurrence_count(n, m, lv));
}

TEST(ArgmaxTable, ReferenceRowCounts) {
  struct Row {
    int n, m;
    std::uint64_t both, opt2, opt1, base;
  };
  const Row rows[] = {{3, 16, 768, 2949123, 863, 4587523},
                      {4, 8, 2048, 44028, 2788, 76028},
                      {5, 5, 3125, 10245, 5472, 21077},
                      {6, 4, 6144, 10890, 13438, 26978}};
  for (const auto& r : rows) {
    EXPECT_EQ(argmax::count_entries(r.n, r.m, OptLevel::opt1_opt2), r.both);
    EXPECT_EQ(argmax::count_entries(r.n, r.m, OptLevel::opt2), r.opt2);
    EXPECT_EQ(argmax::count_entries(r.n, r.m, OptLevel::opt1), r.opt1);
    EXPECT_EQ(argmax::count_entries(r.n, r.m, OptLevel::base), r.base);
  }
}

TEST(ArgmaxTable, CountOverflowIsSignalled) {
  EXPECT_THROW(argmax::count_entries(16, 32, OptLevel::base), CountOverflow);
}

TEST(ArgmaxTable, CapAndArgumentErrors) {
  EXPECT_THROW(argmax::generate_table(0, 4), std::invalid_argument);
  EXPECT_THROW(argmax::generate_table(2, 0), std::invalid_argument);
  EXPECT_THROW(argmax::generate_table(2, 33), std::invalid_argument);
  const std::vector<int> bad{0, 0, 1};
  EXPECT_THROW(argmax::generate_table(3, 2, bad), std::invalid_argument);
  const auto order = argmax::default_tie_order(3);
  EXPECT_THROW(argmax::generate_table(3, 16, order, OptLevel::base, 1000), TableTooLarge);
}

TEST(ArgmaxTable, ExhaustiveAgreementSmallShapes) {
  for (auto [n, m] : {std::pair{2, 4}, {3, 3}, {3, 4}, {4, 3}})
    for (auto lv : kLevels) {
      const auto r = oracles::check_table_exhaustive(argmax::generate_table(n, m, lv));
      EXPECT_TRUE(r.ok()) << n << "," << m << " " << argmax::to_string(lv) << ": " << r.first_mismatch;
      EXPECT_EQ(r.checked, std::uint64_t{1} << (n * m));
    }
}

TEST(ArgmaxTable, ExhaustiveAgreementPermutedTieOrders) {
  std::vector<int> order{0, 1, 2, 3};
  do {
    const auto r = oracles::check_table_exhaustive(argmax::generate_table(4, 2, order, OptLevel::opt1_opt2));
    EXPECT_TRUE(r.ok()) << r.first_mismatch;
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(ArgmaxTable, TextRoundTrip) {
  const std::vector<int> order{1, 2, 0};
  for (auto lv : kLevels) {
    const auto t = argmax::generate_table(3, 3, order, lv);
    EXPECT_EQ(argmax::parse_table(argmax::dump_table(t)), t);
  }
}

TEST(ArgmaxTable, TritSegmentParse) {
  const auto s = argmax::TritSegment::parse("1*0");
  EXPECT_EQ(s.to_string(3), "1*0");
  EXPECT_TRUE(s.matches(0b100));
  EXPECT_TRUE(s.matches(0b110));
  EXPECT_FALSE(s.matches(0b101));
}

TEST(ArgmaxTable, PairComparisonBySubtraction) {
  EXPECT_EQ(argmax::compare_pair_by_subtraction(5, 3), 0);
  EXPECT_EQ(argmax::compare_pair_by_subtraction(3, 5), 1);
  EXPECT_EQ(argmax::compare_pair_by_subtraction(4, 4), 1);
}

TEST(ArgmaxChain, SixByElevenFanThree) {
  const auto chain = argmax::split_argmax(6, 11, 3);
  ASSERT_EQ(chain.stages().size(), 3u);
  EXPECT_EQ(chain.stages()[0].operands.size(), 3u);
  EXPECT_EQ(chain.stages()[1].operands.size(), 3u);
  EXPECT_EQ(chain.stages()[2].operands.size(), 2u);
  EXPECT_EQ(chain.stages()[0].operands[0].index, 0u);
  EXPECT_EQ(chain.stages()[1].operands[0].index, 3u);
  EXPECT_EQ(chain.stages()[2].operands[0].kind, argmax::Operand::Kind::stage);
  EXPECT_EQ(chain.total_entries(), 748u);
  EXPECT_EQ(argmax::chain_entry_count(6, 11, 3), 748u);
  EXPECT_TRUE(oracles::check_chain_random(chain, 20000, 3).ok());
}

TEST(ArgmaxChain, NoSplitNeeded) {
  const auto chain = argmax::split_argmax(2, 4, 2);
  ASSERT_EQ(chain.stages().size(), 1u);
  EXPECT_EQ(chain.stages()[0].table, argmax::generate_table(2, 4));
}

TEST(ArgmaxChain, ComposedEqualsSingleTable) {
  const std::vector<int> order{4, 1, 3, 0, 2};
  const auto chain = argmax::split_argmax(5, 9, 3, order);
  const auto table = argmax::generate_table(5, 9, order, OptLevel::opt1_opt2);
  const auto r = oracles::check_chain_vs_table(chain, table, 10000, 11);
  EXPECT_TRUE(r.ok()) << r.first_mismatch;
}

TEST(ArgmaxChain, TieOrderAcrossGroups) {
  const std::vector<int> order{5, 3, 1, 0, 2, 4};
  const auto chain = argmax::split_argmax(6, 3, 2, order);
  const std::uint32_t v[] = {7, 7, 7, 7, 7, 7};
  EXPECT_EQ(chain.lookup(v), 5u);
  const auto r = oracles::check_chain_random(chain, 20000, 5);
  EXPECT_TRUE(r.ok()) << r.first_mismatch;
}

TEST(ArgmaxChain, FanBelowTwoRejected) { EXPECT_THROW(argmax::split_argmax(4, 3, 1), std::invalid_argument); }

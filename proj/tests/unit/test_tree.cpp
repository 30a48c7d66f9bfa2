#include <gtest/gtest.h>

#include <random>

#include "wirenn/oracles/verify.hpp"
#include "wirenn/oracles/window_oracle.hpp"
#include "wirenn/rnn/bundle_io.hpp"
#include "wirenn/tree/fallback_tree.hpp"

using namespace wirenn;
using tree::Feature;
using tree::PacketFeatures;

namespace {

tree::TreeModel stump(std::int64_t threshold, int left_cls, int right_cls) {
  tree::DecisionTree t;
  t.nodes.resize(3);
  t.nodes[0].leaf = false;
  t.nodes[0].feature = Feature::length;
  t.nodes[0].threshold = threshold;
  t.nodes[0].left = 1;
  t.nodes[0].right = 2;
  t.nodes[1].votes = {0, 0, 0};
  t.nodes[1].votes[static_cast<std::size_t>(left_cls)] = 1;
  t.nodes[2].votes = {0, 0, 0};
  t.nodes[2].votes[static_cast<std::size_t>(right_cls)] = 1;
  return tree::TreeModel(3, 1, {t});
}

}  // namespace

TEST(FallbackTree, ConstantModel) {
  const auto m = tree::TreeModel::constant(4, 2);
  for (std::uint32_t len : {40u, 600u, 1500u}) EXPECT_EQ(m.infer(PacketFeatures::make(len, 64, 0, 5, 6)), 2);
}

TEST(FallbackTree, Stump) {
  const auto m = stump(100, 1, 2);
  EXPECT_EQ(m.infer(PacketFeatures::make(64, 64, 0, 5, 6)), 1);
  EXPECT_EQ(m.infer(PacketFeatures::make(100, 64, 0, 5, 6)), 1);
  EXPECT_EQ(m.infer(PacketFeatures::make(1500, 64, 0, 5, 6)), 2);
  int visited = 0;
  m.leaf_of(0, PacketFeatures::make(64, 64, 0, 5, 6), &visited);
  EXPECT_EQ(visited, 1);
}

TEST(FallbackTree, ForestMatchesRuleList) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto forest = oracles::random_forest(4, 3, 4, seed);
    const oracles::RuleList rules(forest);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 10000; ++i) {
      const auto f = PacketFeatures::make(static_cast<std::uint32_t>(rng() % 1600), static_cast<std::uint32_t>(rng() % 256),
                                          static_cast<std::uint32_t>(rng() % 256), static_cast<std::uint32_t>(rng() % 16),
                                          (rng() & 1) ? 6u : 17u);
      ASSERT_EQ(forest.infer(f), rules.infer(f));
    }
  }
}

TEST(FallbackTree, TieGoesToLowestClass) {
  tree::DecisionTree a, b;
  a.nodes.resize(1);
  a.nodes[0].votes = {0, 1, 0};
  b.nodes.resize(1);
  b.nodes[0].votes = {1, 0, 0};
  const tree::TreeModel m(3, 0, {a, b});
  EXPECT_EQ(m.infer(PacketFeatures::make(1, 1, 1, 1, 6)), 0);
}

TEST(FallbackTree, MalformedRejected) {
  tree::DecisionTree t;
  t.nodes.resize(1);
  t.nodes[0].leaf = false;
  t.nodes[0].left = 5;
  t.nodes[0].right = 6;
  EXPECT_THROW(tree::TreeModel(2, 3, {t}), std::invalid_argument);
  EXPECT_THROW(tree::TreeModel(2, 0, {stump(10, 0, 1).trees()[0]}), std::invalid_argument);
}

TEST(FallbackTree, JsonRoundTrip) {
  const auto forest = oracles::random_forest(3, 2, 3, 9);
  const auto back = rnn::parse_tree(rnn::serialize_tree(forest));
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    const auto f = PacketFeatures::make(static_cast<std::uint32_t>(rng() % 1600), 64, 0, 5, 6);
    ASSERT_EQ(forest.infer(f), back.infer(f));
  }
  EXPECT_EQ(tree::parse_feature("ttl"), Feature::ttl);
  EXPECT_FALSE(tree::parse_feature("window").has_value());
}

#include "wirenn/tree/fallback_tree.hpp"

#include <functional>
#include <stdexcept>
#include <string>

namespace wirenn::tree {

std::string_view to_string(Feature f) noexcept {
  switch (f) {
    case Feature::length: return "length";
    case Feature::ttl: return "ttl";
    case Feature::tos: return "tos";
    case Feature::tcp_offset: return "tcp_offset";
    case Feature::protocol: return "protocol";
  }
  return "?";
}

std::optional<Feature> parse_feature(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const auto f = static_cast<Feature>(i);
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

PacketFeatures PacketFeatures::make(std::uint32_t length, std::uint32_t ttl, std::uint32_t tos,
                                    std::uint32_t tcp_offset, std::uint32_t protocol) {
  PacketFeatures p;
  p.values = {length, ttl, tos, tcp_offset, protocol};
  return p;
}

int DecisionTree::depth() const {
  std::function<int(std::int32_t)> rec = [&](std::int32_t i) -> int {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.leaf) return 0;
    return 1 + std::max(rec(n.left), rec(n.right));
  };
  return nodes.empty() ? 0 : rec(0);
}

TreeModel::TreeModel(int n_classes, int max_depth, std::vector<DecisionTree> trees)
    : n_classes_(n_classes), max_depth_(max_depth), trees_(std::move(trees)) {
  if (n_classes_ < 1) throw std::invalid_argument("tree model: n_classes must be >= 1");
  if (max_depth_ < 0) throw std::invalid_argument("tree model: negative max_depth");
  if (trees_.empty()) throw std::invalid_argument("tree model: no trees");
  for (const auto& t : trees_) {
    if (t.nodes.empty()) throw std::invalid_argument("tree model: empty tree");
    const auto count = static_cast<std::int32_t>(t.nodes.size());
    // Children must point forward so the structure is acyclic.
    for (std::int32_t i = 0; i < count; ++i) {
      const auto& n = t.nodes[static_cast<std::size_t>(i)];
      if (n.leaf) {
        if (n.votes.size() != static_cast<std::size_t>(n_classes_))
          throw std::invalid_argument("tree model: leaf vote vector has wrong length");
      } else if (n.left <= i || n.right <= i || n.left >= count || n.right >= count) {
        throw std::invalid_argument("tree model: bad child index");
      }
    }
    if (t.depth() > max_depth_)
      throw std::invalid_argument("tree model: depth " + std::to_string(t.depth()) + " exceeds max_depth " +
                                  std::to_string(max_depth_));
  }
}

TreeModel TreeModel::constant(int n_classes, int cls) {
  if (cls < 0 || cls >= n_classes) throw std::invalid_argument("constant tree: class out of range");
  TreeNode leaf;
  leaf.votes.assign(static_cast<std::size_t>(n_classes), 0.0);
  leaf.votes[static_cast<std::size_t>(cls)] = 1.0;
  DecisionTree t;
  t.nodes.push_back(std::move(leaf));
  return TreeModel(n_classes, 0, {std::move(t)});
}

std::size_t TreeModel::leaf_of(std::size_t t, const PacketFeatures& pkt, int* visited) const {
  const auto& nodes = trees_[t].nodes;
  std::size_t i = 0;
  int steps = 0;
  while (!nodes[i].leaf) {
    const auto& n = nodes[i];
    ++steps;
    i = static_cast<std::size_t>(static_cast<std::int64_t>(pkt.get(n.feature)) <= n.threshold ? n.left : n.right);
  }
  if (visited) *visited = steps;
  return i;
}

int TreeModel::infer(const PacketFeatures& pkt) const {
  std::vector<double> total(static_cast<std::size_t>(n_classes_), 0.0);
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    const auto& leaf = trees_[t].nodes[leaf_of(t, pkt)];
    for (int c = 0; c < n_classes_; ++c) total[static_cast<std::size_t>(c)] += leaf.votes[static_cast<std::size_t>(c)];
  }
  int best = 0;
  for (int c = 1; c < n_classes_; ++c)
    if (total[static_cast<std::size_t>(c)] > total[static_cast<std::size_t>(best)]) best = c;
  return best;
}

}  // namespace wirenn::tree

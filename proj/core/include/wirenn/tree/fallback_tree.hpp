#pragma once

// Per-packet decision forest used when a flow has no per-flow storage or its
// window is not yet full.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace wirenn::tree {

enum class Feature : std::uint8_t { length, ttl, tos, tcp_offset, protocol };
inline constexpr std::size_t kFeatureCount = 5;

std::string_view to_string(Feature f) noexcept;
/// Returns nullopt for unknown names.
std::optional<Feature> parse_feature(std::string_view name) noexcept;

/// Raw header fields of one packet. tcp_offset is 0 for non-TCP packets.
struct PacketFeatures {
  std::array<std::uint32_t, kFeatureCount> values{};

  std::uint32_t get(Feature f) const noexcept { return values[static_cast<std::size_t>(f)]; }
  void set(Feature f, std::uint32_t v) noexcept { values[static_cast<std::size_t>(f)] = v; }

  static PacketFeatures make(std::uint32_t length, std::uint32_t ttl, std::uint32_t tos,
                             std::uint32_t tcp_offset, std::uint32_t protocol);
};

/// Internal nodes route `value <= threshold` to the left child.
struct TreeNode {
  bool leaf = true;
  Feature feature = Feature::length;
  std::int64_t threshold = 0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::vector<double> votes;  // leaves only, one per class
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int depth() const;
};

class TreeModel {
 public:
  TreeModel() = default;
  /// Throws std::invalid_argument on malformed trees or bounds violations.
  TreeModel(int n_classes, int max_depth, std::vector<DecisionTree> trees);

  /// Single leaf voting for `cls`.
  static TreeModel constant(int n_classes, int cls);

  int n_classes() const noexcept { return n_classes_; }
  int max_depth() const noexcept { return max_depth_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

  /// Sum of leaf votes across trees; ties go to the lowest class index.
  int infer(const PacketFeatures& pkt) const;

  /// Leaf index reached in tree t, plus the number of internal nodes visited.
  std::size_t leaf_of(std::size_t t, const PacketFeatures& pkt, int* visited = nullptr) const;

 private:
  int n_classes_ = 0;
  int max_depth_ = 0;
  std::vector<DecisionTree> trees_;
};

}  // namespace wirenn::tree

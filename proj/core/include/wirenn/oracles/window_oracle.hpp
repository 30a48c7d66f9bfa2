#pragma once

#include <cstdint>
#include <vector>

#include "wirenn/tree/fallback_tree.hpp"

namespace wirenn::oracles {

/// Unbounded per-flow history; the window is its last S entries.
class NaiveHistory {
 public:
  void push(std::uint64_t ev) { evs_.push_back(ev); }
  std::size_t size() const noexcept { return evs_.size(); }
  /// Oldest first. Requires size() >= S.
  std::vector<std::uint64_t> window(int S) const;

 private:
  std::vector<std::uint64_t> evs_;
};

struct WindowCheck {
  std::uint64_t streams = 0;
  std::uint64_t windows = 0;
  std::uint64_t mismatches = 0;
  bool ok() const noexcept { return mismatches == 0 && windows > 0; }
};

/// Feeds every stream of length `len` over an alphabet of `alphabet` ev values
/// (alphabet^len streams) through the ring buffer and the naive history.
WindowCheck check_ring_exhaustive(int S, int len, int alphabet);

/// Same with `streams` random streams of length `len`.
WindowCheck check_ring_random(int S, int len, std::uint64_t streams, std::uint64_t seed);

/// Forest flattened to one rule per leaf combination: conjunctions of interval
/// constraints on each feature, with the summed votes' winner.
class RuleList {
 public:
  explicit RuleList(const tree::TreeModel& model);
  int infer(const tree::PacketFeatures& pkt) const;
  std::size_t size() const noexcept { return rules_.size(); }

 private:
  struct Rule {
    std::array<std::int64_t, tree::kFeatureCount> lo;  // value > lo
    std::array<std::int64_t, tree::kFeatureCount> hi;  // value <= hi
    int cls;
  };
  std::vector<Rule> rules_;
};

}  // namespace wirenn::oracles

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace wirenn::harness {

/// rows = truth, cols = predicted
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int n_classes = 0);

  int n_classes() const noexcept { return n_; }
  void add(int truth, int predicted, std::uint64_t count = 1);
  std::uint64_t at(int truth, int predicted) const;
  std::uint64_t total() const noexcept { return total_; }

  double precision(int c) const;
  double recall(int c) const;
  double f1(int c) const;
  /// Mean F1 over classes that occur as truth or prediction; 0 when empty.
  double macro_f1() const;
  double accuracy() const;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> cells_;
  std::uint64_t total_ = 0;
};

struct CategoryCounts {
  std::uint64_t escalated = 0;
  std::uint64_t fallback = 0;
  std::uint64_t pre_analysis = 0;
  std::uint64_t rnn = 0;

  std::uint64_t sum() const noexcept { return escalated + fallback + pre_analysis + rnn; }
};

struct MetricsReport {
  int n_classes = 0;
  std::uint64_t packets = 0;
  CategoryCounts packet_counts;
  std::uint64_t flows = 0;
  std::uint64_t escalated_flows = 0;
  std::uint64_t flows_with_fallback = 0;
  std::uint64_t rnn_flows = 0;  // flows with at least one RNN decision
  std::uint64_t ambiguous_packets = 0;
  std::uint64_t resets = 0;
  /// Labeled, non-escalated packets (escalated packets get their class off-switch).
  ConfusionMatrix confusion;

  bool partition_holds() const noexcept { return packet_counts.sum() == packets; }
};

void write_metrics(std::ostream& os, const MetricsReport& r);

}  // namespace wirenn::harness

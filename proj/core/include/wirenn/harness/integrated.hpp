#pragma once

// Per-packet driver in data-plane order: flow manager, escalation check,
// counters and embedding, then either the fallback tree (window not full) or
// the windowed RNN with CPR accumulation, ambiguity accounting and the
// periodic reset.

#include <cstdint>
#include <optional>
#include <vector>

#include "wirenn/escalation/calibration.hpp"
#include "wirenn/flow/flow_table.hpp"
#include "wirenn/harness/metrics.hpp"
#include "wirenn/harness/trace.hpp"
#include "wirenn/imis/simulator.hpp"
#include "wirenn/rnn/bundle.hpp"
#include "wirenn/window/engine.hpp"

namespace wirenn::harness {

enum class Category : std::uint8_t { pre_analysis, rnn, fallback, escalated };
std::string_view to_string(Category c) noexcept;

struct PacketDecision {
  Category category = Category::fallback;
  int cls = -1;  // -1 for escalated packets (classified off-switch)
  bool ambiguous = false;
  bool escalation_event = false;
  bool reset = false;
  std::uint32_t pktcnt = 0;    // 0 when the packet has no flow slot
  std::uint32_t conf_raw = 0;  // RNN decisions only

  friend bool operator==(const PacketDecision&, const PacketDecision&) = default;
};

struct IntegratedConfig {
  flow::FlowTableConfig flow;
  bool cross_check_argmax = true;
  bool keep_decisions = true;
  bool collect_records = false;  // needs a labeled trace
  bool emit_escalated = false;
};

struct IntegratedResult {
  std::vector<PacketDecision> decisions;
  MetricsReport metrics;
  std::vector<escalation::ConfidenceRecord> records;
  std::vector<imis::EscalatedPacket> escalated;
  std::uint64_t clock_regressions = 0;
};

class IntegratedEngine {
 public:
  IntegratedEngine(const rnn::ModelBundle& bundle, const IntegratedConfig& cfg);

  PacketDecision process(const PacketEvent& pkt);

  const flow::FlowTable& flows() const noexcept { return table_; }
  const window::WindowEngine& window() const noexcept { return window_; }
  /// Escalated-stream sequence of the last escalated packet's flow.
  std::uint32_t last_escalated_seq() const noexcept { return last_seq_; }

 private:
  const rnn::ModelBundle& bundle_;
  window::WindowEngine window_;
  flow::FlowTable table_;
  tree::TreeModel fallback_;
  std::vector<std::uint32_t> esc_seq_;  // per slot, escalated packets forwarded so far
  std::uint32_t last_seq_ = 0;
};

/// 80 header bytes built from the packet's fields, 240 payload bytes of zeros
/// (traces carry no payload).
imis::Prefix synth_prefix(const PacketEvent& pkt);

/// Throws std::invalid_argument (with the packet index) on invalid input.
IntegratedResult run_integrated(const rnn::ModelBundle& bundle, const Trace& trace, const IntegratedConfig& cfg = {});

/// RNN decision records of a labeled trace, with escalation disabled so every
/// full window yields a record. Throws std::invalid_argument for unlabeled traces.
std::vector<escalation::ConfidenceRecord> confidence_trace(const rnn::ModelBundle& bundle, const Trace& trace,
                                                           const IntegratedConfig& cfg = {});

}  // namespace wirenn::harness

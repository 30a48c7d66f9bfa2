#pragma once

// Straight-line per-packet reference: per-slot history array WIN[pktcnt % S]
// instead of the ring buffer, GRU/output computed from the weights on +-1
// vectors, CPR in doubles and thresholds compared as real confidences.

#include <vector>

#include "wirenn/flow/flow_table.hpp"
#include "wirenn/harness/integrated.hpp"
#include "wirenn/harness/trace.hpp"
#include "wirenn/rnn/bundle.hpp"

namespace wirenn::oracles {

/// Requires bundle.weights. Returns one decision per trace packet in the same
/// shape as the integrated engine.
std::vector<harness::PacketDecision> run_reference(const rnn::ModelBundle& bundle, const harness::Trace& trace,
                                                   const flow::FlowTableConfig& flow_cfg);

struct DecisionDiff {
  std::size_t compared = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
  bool ok() const noexcept { return mismatches == 0 && compared > 0; }
};

/// Compares category, class, ambiguity, escalation events, reset timing and pktcnt.
DecisionDiff compare_decisions(const std::vector<harness::PacketDecision>& engine,
                               const std::vector<harness::PacketDecision>& reference);

}  // namespace wirenn::oracles

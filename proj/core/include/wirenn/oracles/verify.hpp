#pragma once

// Self-check suite: every table-driven component against its independent
// reference, on a given bundle or on a seeded demo bundle.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wirenn/harness/trace.hpp"
#include "wirenn/imis/simulator.hpp"
#include "wirenn/rnn/bundle.hpp"

namespace wirenn::oracles {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t samples = 20000;
  std::uint64_t seed = 1;
  std::size_t trace_flows = 300;
};

/// Random weights, every class threshold at `t_conf` (a fraction of the
/// largest quantized probability), the given t_esc and a random fallback forest.
rnn::ModelBundle demo_bundle(const rnn::Hyperparams& hyper, std::uint64_t seed, double t_conf = 0.3,
                             std::uint32_t t_esc = 4);

/// Forest of `n_trees` complete trees of depth `depth` with random splits.
tree::TreeModel random_forest(int n_classes, int n_trees, int depth, std::uint64_t seed);

/// Every packet of the trace as an escalated record (prefixes synthesized).
std::vector<imis::EscalatedPacket> stream_from_trace(const harness::Trace& trace);

/// Checks needing weights are reported as failed when the bundle has none.
std::vector<VerifyCheck> run_verify(const rnn::ModelBundle& bundle, const VerifyOptions& opts = {});

void write_checks(std::ostream& os, const std::vector<VerifyCheck>& checks);

}  // namespace wirenn::oracles

#pragma once

// Single JSON config file for the CLI; every section and key is optional.
//
//   {
//     "hyperparameters": { ... same keys as the bundle ... },
//     "flow":      { "n_slots": 65536, "timeout_us": 256000, "index_seed": ..., "id_seed": ... },
//     "engine":    { "cross_check_argmax": true },
//     "replay":    { "load": 2000, "duration_s": 0 },
//     "calibrate": { "target": 0.05, "correct_loss_budget": 0.01, "max_t_esc": 65535 },
//     "imis":      { "ingress_capacity": 4096, ..., "pool_policy": "oldest", "ingress_policy": "block",
//                    "latency_by_batch": [ ... ] },
//     "synth":     { "classes": 2, "flows": 1000, "flow_rate": 1000, "separation": 1.0, "seed": 1 },
//     "split":     { "gap_us": 256000 }
//   }

#include <cstdint>
#include <filesystem>
#include <string>

#include "wirenn/escalation/calibration.hpp"
#include "wirenn/flow/flow_table.hpp"
#include "wirenn/harness/trace.hpp"
#include "wirenn/imis/simulator.hpp"
#include "wirenn/rnn/bundle.hpp"

namespace wirenn::harness {

struct SynthOptions {
  int classes = 2;
  std::size_t flows = 1000;
  double flow_rate = 1000;
  double separation = 1.0;
  std::uint64_t seed = 1;
};

struct RunConfig {
  rnn::Hyperparams hyper;
  flow::FlowTableConfig flow;
  bool cross_check_argmax = true;
  ReplayConfig replay;
  double calibrate_target = 0.05;
  escalation::CalibrationOptions calibration;
  imis::SimConfig imis;
  SynthOptions synth;
  std::uint64_t split_gap_us = 256000;
};

/// Throws FormatError on malformed JSON, unknown keys or wrong types.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

}  // namespace wirenn::harness

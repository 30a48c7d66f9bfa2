#pragma once

// Closed-form schedule of the analysis pipeline with unbounded queues: each
// engine is a FIFO server whose start time is max(ready, previous finish),
// batches are formed from whatever is pooled at dispatch time, and the buffer
// serves its two inputs merged by enqueue time.

#include <span>

#include "wirenn/imis/simulator.hpp"

namespace wirenn::oracles {

/// Ignores the capacities and overflow policy in cfg.
imis::SimResult reference_schedule(std::span<const imis::EscalatedPacket> packets, const imis::Classifier& classifier,
                                   const imis::SimConfig& cfg);

}  // namespace wirenn::oracles

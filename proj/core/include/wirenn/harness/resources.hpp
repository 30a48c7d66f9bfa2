#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wirenn/rnn/bundle.hpp"

namespace wirenn::harness {

struct TableResource {
  std::string name;
  std::uint64_t entries = 0;
  int key_bits = 0;
  int value_bits = 0;
  std::uint64_t bits() const noexcept { return entries * static_cast<std::uint64_t>(value_bits); }
};

struct ArgmaxStageResource {
  int group = 0;  // operands compared
  int key_bits = 0;
  std::uint64_t entries = 0;
};

struct ResourceReport {
  std::vector<TableResource> exact_tables;  // SRAM, one value per key
  std::vector<ArgmaxStageResource> argmax_stages;  // TCAM
  std::uint64_t argmax_entries = 0;
  int cpr_width = 0;
  // Stateful bits per flow slot.
  int flow_info_bits = 64;  // TrueID + timestamp
  int ev_bits = 0;          // 8 * (S - 1) ring cells + 8 bits of packet counters
  int cpr_bits = 0;         // n_classes * cpr_width
  int counter_bits = 0;     // wincnt, esccnt, esc_flag, pktcnt
  int per_flow_bits() const noexcept { return flow_info_bits + ev_bits + cpr_bits + counter_bits; }
  std::uint64_t exact_table_bits() const noexcept;
};

ResourceReport estimate_resources(const rnn::ModelBundle& bundle);
/// From hyperparameters alone (table shapes follow the merge layout).
ResourceReport estimate_resources(const rnn::Hyperparams& hyper);

void write_resources(std::ostream& os, const ResourceReport& r, std::uint32_t n_slots = 0);

}  // namespace wirenn::harness

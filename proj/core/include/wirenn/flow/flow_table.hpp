#pragma once

// Hash-indexed per-flow register block. A slot belongs to one flow (by
// TrueID) until that flow goes silent for `timeout_us`; a different flow
// hashing to a live slot is sent to the per-packet fallback model.

#include <cstdint>
#include <functional>
#include <vector>

#include "wirenn/flow/hash.hpp"
#include "wirenn/window/engine.hpp"

namespace wirenn::flow {

struct FlowTableConfig {
  std::uint32_t n_slots = 65536;
  std::uint64_t timeout_us = 256000;
  std::uint32_t index_seed = 0x3c6ef372u;
  std::uint32_t id_seed = 0xa54ff53au;
};

struct FlowSlot {
  bool occupied = false;
  std::uint32_t true_id = 0;
  std::uint64_t last_ts = 0;
  window::PacketCounters counters;
  window::RingBuffer ring;
  window::CprState cpr;
};

struct AdmitResult {
  enum class Outcome { fresh, existing, fallback };
  Outcome outcome = Outcome::fallback;
  std::uint32_t slot = 0;
  std::uint64_t ipd_us = 0;  // 0 for fresh and fallback

  bool admitted() const noexcept { return outcome != Outcome::fallback; }
};

class FlowTable {
 public:
  using IndexHash = std::function<std::uint32_t(const FiveTuple&)>;

  /// `window` sizes each slot's ring buffer. Throws for n_slots = 0.
  FlowTable(FlowTableConfig cfg, int window);

  const FlowTableConfig& config() const noexcept { return cfg_; }

  std::uint32_t index_of(const FiveTuple& key) const;
  std::uint32_t true_id_of(const FiveTuple& key) const noexcept { return hash_tuple(key, cfg_.id_seed); }

  /// Timed out (or never used) slots are reinitialized for `key`; a live slot
  /// with the same TrueID is refreshed; anything else falls back.
  AdmitResult admit(const FiveTuple& key, std::uint64_t now);

  /// now - last_ts, clamped to 0 (and counted) on clock regression.
  std::uint64_t ipd_of(const FlowSlot& slot, std::uint64_t now);

  bool timed_out(const FlowSlot& slot, std::uint64_t now) const noexcept;

  FlowSlot& slot(std::uint32_t i) { return slots_.at(i); }
  const FlowSlot& slot(std::uint32_t i) const { return slots_.at(i); }

  std::uint64_t clock_regressions() const noexcept { return clock_regressions_; }

  /// Test hook: replaces the index hash (result is still reduced mod n_slots).
  void set_index_hash(IndexHash h) { index_hash_ = std::move(h); }

 private:
  FlowTableConfig cfg_;
  int window_;
  std::vector<FlowSlot> slots_;
  IndexHash index_hash_;
  std::uint64_t clock_regressions_ = 0;
};

}  // namespace wirenn::flow

#include "wirenn/flow/flow_table.hpp"

#include <stdexcept>

namespace wirenn::flow {

FlowTable::FlowTable(FlowTableConfig cfg, int window) : cfg_(cfg), window_(window) {
  if (cfg_.n_slots == 0) throw std::invalid_argument("flow table needs at least one slot");
  if (cfg_.timeout_us == 0) throw std::invalid_argument("flow timeout must be positive");
  FlowSlot empty;
  empty.ring = window::RingBuffer(window);
  slots_.assign(cfg_.n_slots, empty);
}

std::uint32_t FlowTable::index_of(const FiveTuple& key) const {
  const std::uint32_t h = index_hash_ ? index_hash_(key) : hash_tuple(key, cfg_.index_seed);
  return h % cfg_.n_slots;
}

bool FlowTable::timed_out(const FlowSlot& slot, std::uint64_t now) const noexcept {
  if (!slot.occupied) return true;
  return now >= slot.last_ts && now - slot.last_ts >= cfg_.timeout_us;
}

std::uint64_t FlowTable::ipd_of(const FlowSlot& slot, std::uint64_t now) {
  if (now < slot.last_ts) {
    ++clock_regressions_;
    return 0;
  }
  return now - slot.last_ts;
}

AdmitResult FlowTable::admit(const FiveTuple& key, std::uint64_t now) {
  AdmitResult r;
  r.slot = index_of(key);
  FlowSlot& s = slots_[r.slot];
  const std::uint32_t tid = true_id_of(key);
  if (timed_out(s, now)) {
    s = FlowSlot{};
    s.occupied = true;
    s.true_id = tid;
    s.last_ts = now;
    s.ring = window::RingBuffer(window_);
    r.outcome = AdmitResult::Outcome::fresh;
    return r;
  }
  if (s.true_id == tid) {
    r.ipd_us = ipd_of(s, now);
    s.last_ts = std::max(s.last_ts, now);
    r.outcome = AdmitResult::Outcome::existing;
    return r;
  }
  r.outcome = AdmitResult::Outcome::fallback;
  return r;
}

}  // namespace wirenn::flow

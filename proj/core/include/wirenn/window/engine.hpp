#pragma once

// Per-flow sliding-window state and the transitions applied to it for every
// packet once the flow has a storage slot.

#include <array>
#include <cstdint>
#include <span>

#include "wirenn/argmax/chain.hpp"
#include "wirenn/rnn/bundle.hpp"

namespace wirenn::window {

/// ctr1 saturates at S, ctr2 cycles through [0, S-2]. ctr1 = 0 marks a flow
/// that has not seen a packet yet; after advancing, packet i of a flow
/// observes ctr1 = min(i, S) and ctr2 = (i - 1) mod (S - 1). pktcnt is the
/// unbounded count used for the periodic reset.
struct PacketCounters {
  std::uint32_t ctr1 = 0;
  std::uint32_t ctr2 = 0;
  std::uint32_t pktcnt = 0;

  friend bool operator==(const PacketCounters&, const PacketCounters&) = default;
};

/// Throws std::invalid_argument for S < 2.
PacketCounters advance_counters(PacketCounters c, int S);

inline bool window_full(const PacketCounters& c, int S) noexcept { return c.ctr1 == static_cast<std::uint32_t>(S); }

/// S-1 bins of 8 bits.
class RingBuffer {
 public:
  RingBuffer() = default;
  explicit RingBuffer(int S);

  int bins() const noexcept { return bins_; }
  std::uint8_t bin(int i) const noexcept { return cells_[static_cast<std::size_t>(i)]; }
  void clear() noexcept { cells_.fill(0); }

  /// Pre-analysis path: ev goes to bin ctr2.
  void store(const PacketCounters& c, std::uint8_t ev);

  /// Full window: reads all bins at once, orders them oldest first starting
  /// at bin ctr2, appends ev as the S-th vector, then overwrites bin ctr2
  /// (the packet that just left the window) with ev. `out` must hold S values.
  /// Throws std::logic_error when the window is not full.
  void store_and_gather(const PacketCounters& c, std::uint8_t ev, std::span<std::uint64_t> out);

  friend bool operator==(const RingBuffer&, const RingBuffer&) = default;

 private:
  int bins_ = 0;
  std::array<std::uint8_t, rnn::kMaxWindow - 1> cells_{};
};

struct CprState {
  std::array<std::uint32_t, rnn::kMaxClasses> cpr{};
  std::uint32_t wincnt = 0;
  std::uint32_t esccnt = 0;
  bool esc_flag = false;

  friend bool operator==(const CprState&, const CprState&) = default;
};

struct Decision {
  int cls = 0;
  bool ambiguous = false;
  bool escalation_event = false;  // esc_flag went from false to true on this packet
};

/// Everything the per-packet transitions need from the bundle, with the CPR
/// argmax chain prebuilt.
class WindowEngine {
 public:
  struct Options {
    bool cross_check_argmax = true;  // compare the chain against a plain argmax on every decision
  };

  explicit WindowEngine(const rnn::ModelBundle& bundle) : WindowEngine(bundle, Options{}) {}
  WindowEngine(const rnn::ModelBundle& bundle, Options opts);

  const rnn::ModelBundle& bundle() const noexcept { return *bundle_; }
  const argmax::ArgmaxChain& chain() const noexcept { return chain_; }
  int cpr_width() const noexcept { return cpr_width_; }
  std::uint32_t cpr_limit() const noexcept { return cpr_limit_; }

  /// CPR += PR, wincnt += 1, class = chain argmax, ambiguity via subtraction
  /// and sign check, esccnt/esc_flag update. Throws std::logic_error if a CPR
  /// counter would exceed its declared width.
  Decision accumulate_and_decide(CprState& st, const rnn::IntermediateResult& pr) const;

  /// Clears CPR and wincnt when pktcnt is a multiple of K. Returns whether it fired.
  bool periodic_reset(CprState& st, std::uint32_t pktcnt) const noexcept;

  /// (CPR[c] << prob_bits) - T_conf[c] * wincnt < 0
  bool is_ambiguous(std::uint32_t cpr_c, std::uint32_t wincnt, int c) const noexcept;

  /// floor((CPR[c] << prob_bits) / wincnt): confidence in the T_conf scale.
  std::uint32_t confidence_raw(std::uint32_t cpr_c, std::uint32_t wincnt) const noexcept;

  std::uint64_t argmax_mismatches() const noexcept { return mismatches_; }

 private:
  const rnn::ModelBundle* bundle_;
  Options opts_;
  argmax::ArgmaxChain chain_;
  int cpr_width_ = 0;
  std::uint32_t cpr_limit_ = 0;
  mutable std::uint64_t mismatches_ = 0;
};

/// Plain argmax with ties resolved by tie_order.
int software_argmax(std::span<const std::uint32_t> values, std::span<const int> tie_order) noexcept;

}  // namespace wirenn::window

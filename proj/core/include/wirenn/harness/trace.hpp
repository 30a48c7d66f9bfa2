#pragma once

// Packet traces: the record type, text/binary formats, flow splitting,
// synthetic generation and load-controlled replay.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <vector>

#include "wirenn/flow/hash.hpp"
#include "wirenn/tree/fallback_tree.hpp"

namespace wirenn::harness {

inline constexpr std::uint32_t kNoFlow = 0xFFFFFFFFu;

struct PacketEvent {
  std::uint64_t time_us = 0;
  flow::FiveTuple key;
  std::uint32_t length = 0;
  int label = -1;  // -1: unlabeled
  std::uint8_t ttl = 64;
  std::uint8_t tos = 0;
  std::uint8_t tcp_offset = 0;
  std::uint32_t flow = kNoFlow;  // flow record id

  tree::PacketFeatures features() const {
    return tree::PacketFeatures::make(length, ttl, tos, tcp_offset, key.proto);
  }
  friend bool operator==(const PacketEvent&, const PacketEvent&) = default;
};

struct Trace {
  std::vector<PacketEvent> packets;

  std::size_t flow_count() const;
  bool labeled() const;
  int max_label() const;
  std::uint64_t duration_us() const;
  /// Throws std::invalid_argument when timestamps decrease or a label is
  /// outside [-1, n_classes).
  void validate(int n_classes = std::numeric_limits<int>::max()) const;
  /// Gives packets without a flow id one per five-tuple, first-seen order.
  void assign_flow_ids_by_tuple();
};

struct ReadStats {
  std::size_t lines = 0;
  std::size_t malformed = 0;
};

/// Comma-separated, header row required. Columns in any order:
///   time_us,src,dst,sport,dport,proto,length   (required)
///   label,ttl,tos,tcp_offset,flow              (optional)
/// Malformed rows are skipped and counted when `stats` is given, otherwise
/// they throw FormatError.
Trace read_trace_csv(std::istream& is, ReadStats* stats = nullptr);
void write_trace_csv(std::ostream& os, const Trace& trace);

/// "WNTRC001", u64 count, then per packet: u64 time_us, 13-byte key,
/// u32 length, i32 label, u8 ttl, u8 tos, u8 tcp_offset, u32 flow (little-endian).
Trace read_trace_binary(std::istream& is);
void write_trace_binary(std::ostream& os, const Trace& trace);

/// Picks the format from the file's first bytes / the extension (.bin = binary).
Trace load_trace(const std::filesystem::path& path, ReadStats* stats = nullptr);
void save_trace(const std::filesystem::path& path, const Trace& trace);

struct SplitStats {
  std::size_t input = 0;
  std::size_t dropped = 0;  // neither TCP nor UDP
  std::size_t flows = 0;
};

/// A packet more than `gap_us` after the previous packet of its five-tuple
/// starts a new flow record. Non-TCP/UDP packets are removed. Output keeps
/// the input's packet order with fresh flow ids.
Trace split_flows(const std::vector<PacketEvent>& events, std::uint64_t gap_us = 256000, SplitStats* stats = nullptr);

struct ClassSpec {
  double len_mean = 500;
  double len_std = 50;
  double ipd_mean_us = 1000;  // exponential
  std::uint32_t min_packets = 8;
  std::uint32_t max_packets = 40;
  std::uint8_t proto = 6;
  std::uint8_t ttl = 64;
  std::uint8_t tos = 0;
};

struct SynthSpec {
  std::vector<ClassSpec> classes;
  std::size_t flows = 1000;
  double flow_rate = 1000;  // new flows per second, Poisson arrivals
  std::uint64_t seed = 1;
};

/// `n_classes` classes whose length means are spread evenly over [100, 1300]
/// and IPD means over [200 us, 20 ms]; separation in (0, 1] scales the spread.
SynthSpec default_synth_spec(int n_classes, double separation = 1.0);

/// True when two classes share identical parameters.
bool is_degenerate(const SynthSpec& spec);

/// Labeled trace, deterministic in spec.seed. Throws for fewer than 2 classes.
Trace synth_trace(const SynthSpec& spec);

struct ReplayConfig {
  double load = 2000;      // new flows per second; +inf starts every flow at start_us
  double duration_s = 0;   // > 0: keep releasing (looping over the flows) for this long
  std::uint64_t start_us = 0;
};

struct ReplayStats {
  std::size_t flows_released = 0;
  std::size_t loops = 1;
  std::uint64_t period_us = 0;  // flows_released / load: the nominal release period
  std::uint64_t window_us = 0;  // time between first and last flow start
  double achieved_load = 0;     // flows started per second over the release window
};

/// Flow k starts at start_us + floor(k * 1e6 / load); packets keep their
/// offsets within the flow. Loop copies after the first get the loop index
/// XORed into the source address's top byte so they are distinct flows.
Trace replay(const Trace& trace, const ReplayConfig& cfg, ReplayStats* stats = nullptr);

}  // namespace wirenn::harness

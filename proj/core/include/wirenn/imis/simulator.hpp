#pragma once

// Discrete-event model of the off-switch analysis pipeline for escalated
// flows: parser -> pool -> analyzer -> buffer, each a single-threaded engine
// with a fixed service time, connected by bounded FIFO rings. Everything runs
// on a virtual microsecond clock.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wirenn/flow/hash.hpp"

namespace wirenn::imis {

inline constexpr std::size_t kHeaderBytes = 80;
inline constexpr std::size_t kPayloadBytes = 240;
inline constexpr std::size_t kPrefixBytes = kHeaderBytes + kPayloadBytes;
inline constexpr int kPrefixPackets = 5;

using Prefix = std::array<std::uint8_t, kPrefixBytes>;

struct EscalatedPacket {
  flow::FiveTuple key;
  std::uint64_t time_us = 0;
  std::uint32_t seq = 0;  // index within the flow's escalated packets
  Prefix prefix{};

  friend bool operator==(const EscalatedPacket&, const EscalatedPacket&) = default;
};

struct ClassifierOutput {
  int cls = 0;
  bool final = false;
};

/// (flow key, kPrefixPackets zero-padded prefixes, number of real prefixes) -> result.
/// The simulator never marks a result final while fewer than kPrefixPackets
/// prefixes are available.
using Classifier = std::function<ClassifierOutput(const flow::FiveTuple&, std::span<const Prefix>, int)>;

/// Deterministic stand-in: class = hash(key, prefixes) mod n_classes, final
/// once all prefixes are present.
Classifier hash_classifier(int n_classes, std::uint32_t seed = 0);

enum class OverflowPolicy { block, drop };
enum class PoolPolicy { oldest_first, freshest_first };

std::string_view to_string(OverflowPolicy p) noexcept;
std::string_view to_string(PoolPolicy p) noexcept;
std::optional<OverflowPolicy> parse_overflow_policy(std::string_view s) noexcept;
std::optional<PoolPolicy> parse_pool_policy(std::string_view s) noexcept;

inline constexpr std::size_t kUnbounded = static_cast<std::size_t>(-1);

struct SimConfig {
  std::size_t ingress_capacity = 4096;  // NIC ring feeding the parser
  std::size_t pool_capacity = 4096;     // parser -> pool
  std::size_t buffer_capacity = 4096;   // parser -> buffer
  std::size_t result_capacity = 1024;   // analyzer -> buffer
  OverflowPolicy ingress_policy = OverflowPolicy::block;
  PoolPolicy pool_policy = PoolPolicy::oldest_first;
  std::size_t batch_size = 32;          // flows per analyzer batch
  std::uint64_t parse_us = 0;
  std::uint64_t pool_us = 0;
  std::uint64_t buffer_us = 0;
  /// Batch latency: latency_by_batch[b-1] when present, else
  /// infer_base_us + infer_per_flow_us * b.
  std::uint64_t infer_base_us = 1000;
  std::uint64_t infer_per_flow_us = 0;
  std::vector<std::uint64_t> latency_by_batch;

  std::uint64_t batch_latency(std::size_t b) const;
  void validate() const;
};

inline constexpr std::uint64_t kNever = static_cast<std::uint64_t>(-1);

/// One released packet. Times are virtual microseconds; kNever marks phases a
/// packet did not go through.
struct ReleaseRecord {
  std::uint64_t index = 0;  // position in the input stream
  std::uint32_t flow = 0;   // dense flow id, first-seen order
  std::uint32_t seq = 0;    // per-flow arrival order at the parser
  std::uint64_t arrival = 0;
  std::uint64_t parsed = 0;
  std::uint64_t pooled = kNever;      // prefix stored in the pool (possibly after release)
  std::uint64_t dispatched = kNever;  // batch holding this prefix left the pool
  std::uint64_t result = kNever;      // that batch's results left the analyzer
  std::uint64_t release = 0;
  int cls = 0;
  bool final = false;
  bool full_pipeline = false;  // released by the result of its own prefix's batch

  friend bool operator==(const ReleaseRecord&, const ReleaseRecord&) = default;
};

struct SimStats {
  std::uint64_t ingested = 0;
  std::uint64_t dropped = 0;
  std::uint64_t batches = 0;
  std::uint64_t max_batches_per_flow = 0;
  std::uint64_t flows = 0;
  std::uint64_t events = 0;
  std::uint64_t end_time = 0;
};

struct SimResult {
  std::vector<ReleaseRecord> log;  // release order
  SimStats stats;
};

/// Throws std::invalid_argument if the stream is not time-ordered or the
/// config is invalid.
SimResult run_pipeline(std::span<const EscalatedPacket> packets, const Classifier& classifier, const SimConfig& cfg);

struct PhaseStats {
  std::string name;
  std::size_t count = 0;
  double mean = 0.0;
  std::uint64_t min = 0, p50 = 0, p90 = 0, p99 = 0, max = 0;
};

struct LatencyReport {
  std::size_t packets = 0;  // full-pipeline packets
  std::vector<PhaseStats> phases;  // parse->pool, pool->analyze, analyze->result, result->release, end-to-end
};

/// Only full-pipeline packets contribute. Throws on an empty log.
LatencyReport latency_report(std::span<const ReleaseRecord> log);
/// Nearest-rank percentile of a sorted sample.
std::uint64_t percentile(std::span<const std::uint64_t> sorted, double q);

void write_latency_report(std::ostream& os, const LatencyReport& r);

/// Escalated-stream binary file: "WNESC001", u64 count, then per record
/// 13-byte key, u64 time_us, u32 seq, 320-byte prefix (integers little-endian).
void write_stream(std::ostream& os, std::span<const EscalatedPacket> packets);
std::vector<EscalatedPacket> read_stream(std::istream& is);
void save_stream(const std::string& path, std::span<const EscalatedPacket> packets);
std::vector<EscalatedPacket> load_stream(const std::string& path);

/// Release log as comma-separated columns with a header row.
void write_release_log(std::ostream& os, std::span<const ReleaseRecord> log);

}  // namespace wirenn::imis

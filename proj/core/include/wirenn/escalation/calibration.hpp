#pragma once

// Threshold calibration from per-packet confidence records.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "wirenn/rnn/bundle.hpp"

namespace wirenn::escalation {

/// One RNN decision. conf_raw = floor((CPR[predicted] << prob_bits) / wincnt),
/// i.e. the confidence in the same fixed-point scale as T_conf.
struct ConfidenceRecord {
  std::uint32_t flow = 0;
  std::uint32_t pkt_idx = 0;  // 1-based packet index within the flow
  int predicted = 0;
  int truth = 0;
  std::uint32_t conf_raw = 0;

  bool correct() const noexcept { return predicted == truth; }
  friend bool operator==(const ConfidenceRecord&, const ConfidenceRecord&) = default;
};

inline constexpr std::uint32_t kInfeasible = 0xFFFFFFFFu;

struct CalibrationOptions {
  double correct_loss_budget = 0.01;
  std::uint32_t max_t_esc = 65535;
};

struct CalibrationResult {
  std::vector<std::uint32_t> t_conf_raw;
  std::uint32_t t_esc = kInfeasible;
  bool feasible = false;
  double escalated_fraction = 0.0;  // under the returned thresholds
  std::size_t flows = 0;            // flows with at least one record
};

/// Per class c, the largest T in [0, 2^(2*prob_bits)] such that at most
/// `correct_loss_budget` of the correctly classified records predicting c have
/// conf_raw < T; then the smallest T_esc whose escalated-flow fraction is at
/// most `target`. Throws std::invalid_argument on empty records or a target
/// outside (0, 1].
CalibrationResult calibrate(std::span<const ConfidenceRecord> records, double target, int n_classes, int prob_bits,
                            const CalibrationOptions& opts = {});

struct ReplayResult {
  std::size_t flows = 0;
  std::size_t escalated_flows = 0;
  double fraction() const noexcept {
    return flows == 0 ? 0.0 : static_cast<double>(escalated_flows) / static_cast<double>(flows);
  }
};

/// Walks each flow's records in order, counting conf_raw < T_conf[predicted];
/// a flow escalates once the count reaches t_esc. Records must be grouped by
/// flow in packet order (as produced by a run).
ReplayResult replay_escalation(std::span<const ConfidenceRecord> records, std::span<const std::uint32_t> t_conf_raw,
                               std::uint32_t t_esc);

/// Whitespace-separated columns with a header line:
///   flow pkt_idx predicted truth conf_raw
void write_records(std::ostream& os, std::span<const ConfidenceRecord> records);
std::vector<ConfidenceRecord> read_records(std::istream& is);
void save_records(const std::filesystem::path& path, std::span<const ConfidenceRecord> records);
std::vector<ConfidenceRecord> load_records(const std::filesystem::path& path);

}  // namespace wirenn::escalation

#include "wirenn/escalation/calibration.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "wirenn/error.hpp"

namespace wirenn::escalation {

namespace {

/// Max ambiguous count per flow, in first-seen flow order.
std::vector<std::uint32_t> ambiguous_counts(std::span<const ConfidenceRecord> records,
                                            std::span<const std::uint32_t> t_conf_raw) {
  std::unordered_map<std::uint32_t, std::size_t> index;
  std::vector<std::uint32_t> counts;
  for (const auto& r : records) {
    auto [it, inserted] = index.try_emplace(r.flow, counts.size());
    if (inserted) counts.push_back(0);
    if (r.predicted < 0 || static_cast<std::size_t>(r.predicted) >= t_conf_raw.size())
      throw std::invalid_argument("record predicts class " + std::to_string(r.predicted) + " with no threshold");
    if (r.conf_raw < t_conf_raw[static_cast<std::size_t>(r.predicted)]) ++counts[it->second];
  }
  return counts;
}

}  // namespace

CalibrationResult calibrate(std::span<const ConfidenceRecord> records, double target, int n_classes, int prob_bits,
                            const CalibrationOptions& opts) {
  if (records.empty()) throw std::invalid_argument("calibrate: no records");
  if (!(target > 0.0 && target <= 1.0)) throw std::invalid_argument("calibrate: target must be in (0, 1]");
  if (n_classes < 1 || prob_bits < 1 || prob_bits > 8) throw std::invalid_argument("calibrate: bad class count or prob_bits");
  if (!(opts.correct_loss_budget >= 0.0 && opts.correct_loss_budget <= 1.0))
    throw std::invalid_argument("calibrate: correct-loss budget must be in [0, 1]");

  const std::uint32_t t_max = 1u << (2 * prob_bits);
  CalibrationResult out;
  out.t_conf_raw.assign(static_cast<std::size_t>(n_classes), 0);
  for (int c = 0; c < n_classes; ++c) {
    std::vector<std::uint32_t> confs;
    for (const auto& r : records)
      if (r.correct() && r.predicted == c) confs.push_back(r.conf_raw);
    if (confs.empty()) {
      out.t_conf_raw[static_cast<std::size_t>(c)] = t_max;
      continue;
    }
    std::sort(confs.begin(), confs.end());
    const auto allowed = static_cast<std::size_t>(opts.correct_loss_budget * static_cast<double>(confs.size()));
    // #{conf < T} <= allowed  <=>  T <= confs[allowed] (or any T when allowed covers everything)
    std::uint32_t t = allowed >= confs.size() ? t_max : std::min(confs[allowed], t_max);
    out.t_conf_raw[static_cast<std::size_t>(c)] = t;
  }

  const auto counts = ambiguous_counts(records, out.t_conf_raw);
  out.flows = counts.size();
  std::vector<std::uint32_t> sorted = counts;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // escalated(T) = #{count >= T}; allowed escalations = floor(target * flows)
  const auto budget = static_cast<std::size_t>(target * static_cast<double>(out.flows));
  std::uint32_t t_esc = 1;
  if (budget < sorted.size()) t_esc = sorted[budget] + 1;  // the (budget+1)-th largest count must not escalate
  if (t_esc == 0) t_esc = 1;
  if (t_esc > opts.max_t_esc) {
    out.t_esc = kInfeasible;
    out.feasible = false;
  } else {
    out.t_esc = t_esc;
    out.feasible = true;
  }
  out.escalated_fraction = replay_escalation(records, out.t_conf_raw, out.t_esc).fraction();
  return out;
}

ReplayResult replay_escalation(std::span<const ConfidenceRecord> records, std::span<const std::uint32_t> t_conf_raw,
                               std::uint32_t t_esc) {
  ReplayResult r;
  const auto counts = ambiguous_counts(records, t_conf_raw);
  r.flows = counts.size();
  if (t_esc == 0) t_esc = 1;
  for (auto c : counts)
    if (c >= t_esc) ++r.escalated_flows;
  return r;
}

void write_records(std::ostream& os, std::span<const ConfidenceRecord> records) {
  os << "flow pkt_idx predicted truth conf_raw\n";
  for (const auto& r : records)
    os << r.flow << ' ' << r.pkt_idx << ' ' << r.predicted << ' ' << r.truth << ' ' << r.conf_raw << '\n';
}

std::vector<ConfidenceRecord> read_records(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("flow", 0) != 0) throw FormatError("records: missing header line");
  std::vector<ConfidenceRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    ConfidenceRecord r;
    std::string extra;
    if (!(ls >> r.flow >> r.pkt_idx >> r.predicted >> r.truth >> r.conf_raw) || (ls >> extra))
      throw FormatError("records: malformed line " + std::to_string(lineno));
    out.push_back(r);
  }
  return out;
}

void save_records(const std::filesystem::path& path, std::span<const ConfidenceRecord> records) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_records(os, records);
}

std::vector<ConfidenceRecord> load_records(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_records(is);
}

}  // namespace wirenn::escalation

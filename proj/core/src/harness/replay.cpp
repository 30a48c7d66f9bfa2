#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "wirenn/harness/trace.hpp"

namespace wirenn::harness {

Trace replay(const Trace& trace, const ReplayConfig& cfg, ReplayStats* stats) {
  if (!(cfg.load > 0)) throw std::invalid_argument("replay: load must be positive");
  if (!(cfg.duration_s >= 0)) throw std::invalid_argument("replay: duration must be non-negative");

  // Flow records in order of their first packet.
  std::vector<std::vector<const PacketEvent*>> flows;
  std::map<std::uint32_t, std::size_t> index;
  for (const auto& p : trace.packets) {
    if (p.flow == kNoFlow) throw std::invalid_argument("replay: trace has packets without a flow id");
    auto [it, inserted] = index.try_emplace(p.flow, flows.size());
    if (inserted) flows.emplace_back();
    flows[it->second].push_back(&p);
  }
  ReplayStats st;
  Trace out;
  if (flows.empty()) {
    if (stats) *stats = st;
    return out;
  }

  const bool instant = std::isinf(cfg.load);
  std::size_t total = flows.size();
  if (cfg.duration_s > 0 && !instant) {
    const auto wanted = static_cast<std::size_t>(std::ceil(cfg.duration_s * cfg.load));
    total = std::max(total, wanted);
  }
  st.flows_released = total;
  st.loops = (total + flows.size() - 1) / flows.size();

  std::uint64_t last_start = cfg.start_us;
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t loop = k / flows.size();
    const auto& f = flows[k % flows.size()];
    const std::uint64_t start =
        cfg.start_us + (instant ? 0 : static_cast<std::uint64_t>(std::floor(static_cast<double>(k) * 1e6 / cfg.load)));
    last_start = start;
    const std::uint64_t t0 = f.front()->time_us;
    for (const PacketEvent* p : f) {
      PacketEvent q = *p;
      q.time_us = start + (p->time_us - t0);
      q.flow = static_cast<std::uint32_t>(k);
      q.key.src ^= static_cast<std::uint32_t>(loop & 0xFF) << 24;
      out.packets.push_back(q);
    }
  }
  std::stable_sort(out.packets.begin(), out.packets.end(),
                   [](const PacketEvent& a, const PacketEvent& b) { return a.time_us < b.time_us; });
  st.window_us = last_start - cfg.start_us;
  st.period_us = instant ? 0 : static_cast<std::uint64_t>(std::llround(static_cast<double>(total) * 1e6 / cfg.load));
  st.achieved_load = st.window_us == 0 ? std::numeric_limits<double>::infinity()
                                       : static_cast<double>(total - 1) / (static_cast<double>(st.window_us) * 1e-6);
  if (stats) *stats = st;
  return out;
}

}  // namespace wirenn::harness

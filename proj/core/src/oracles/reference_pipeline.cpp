#include "wirenn/oracles/reference_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "wirenn/oracles/rnn_oracle.hpp"

namespace wirenn::oracles {

namespace {

struct RefSlot {
  std::uint32_t tid = 0;
  std::uint64_t last = 0;
  std::uint32_t pktcnt = 0;
  std::vector<std::uint64_t> win;  // S entries
  std::vector<double> cpr;
  std::uint32_t wincnt = 0;
  std::uint32_t esccnt = 0;
  bool esc = false;
};

}  // namespace

std::vector<harness::PacketDecision> run_reference(const rnn::ModelBundle& bundle, const harness::Trace& trace,
                                                   const flow::FlowTableConfig& cfg) {
  if (!bundle.weights) throw std::invalid_argument("reference pipeline needs full-precision weights");
  const auto& hp = bundle.hyper;
  const auto& w = *bundle.weights;
  const int S = hp.window;
  const auto n = static_cast<std::size_t>(hp.n_classes);
  const tree::TreeModel fallback = bundle.fallback_or_default();
  std::vector<double> t_conf(n);
  for (std::size_t c = 0; c < n; ++c)
    t_conf[c] = static_cast<double>(bundle.thresholds.t_conf_raw[c]) / static_cast<double>(1u << hp.prob_bits);

  std::unordered_map<std::uint32_t, RefSlot> slots;  // absent = never used
  std::vector<harness::PacketDecision> out;
  out.reserve(trace.packets.size());

  for (const auto& p : trace.packets) {
    harness::PacketDecision d;
    const std::uint32_t idx = flow::hash_tuple(p.key, cfg.index_seed) % cfg.n_slots;
    const std::uint32_t tid = flow::hash_tuple(p.key, cfg.id_seed);
    auto it = slots.find(idx);
    std::uint64_t ipd = 0;
    if (it == slots.end() || (p.time_us >= it->second.last && p.time_us - it->second.last >= cfg.timeout_us)) {
      RefSlot fresh;
      fresh.tid = tid;
      fresh.last = p.time_us;
      fresh.win.assign(static_cast<std::size_t>(S), 0);
      fresh.cpr.assign(n, 0.0);
      it = slots.insert_or_assign(idx, std::move(fresh)).first;
    } else if (it->second.tid == tid) {
      ipd = p.time_us >= it->second.last ? p.time_us - it->second.last : 0;
      it->second.last = std::max(it->second.last, p.time_us);
    } else {
      d.category = harness::Category::fallback;
      d.cls = fallback.infer(p.features());
      out.push_back(d);
      continue;
    }
    RefSlot& f = it->second;

    if (f.esc) {
      d.category = harness::Category::escalated;
      d.pktcnt = f.pktcnt;
      out.push_back(d);
      continue;
    }

    ++f.pktcnt;
    d.pktcnt = f.pktcnt;
    const std::uint64_t ev = to_bits(ref_embed_packet(hp, w, p.length, ipd));
    f.win[f.pktcnt % static_cast<std::uint32_t>(S)] = ev;

    if (f.pktcnt < static_cast<std::uint32_t>(S)) {
      d.category = harness::Category::pre_analysis;
      d.cls = fallback.infer(p.features());
      out.push_back(d);
      continue;
    }

    std::vector<std::uint64_t> evs;
    for (int i = 1; i <= S; ++i) evs.push_back(f.win[(f.pktcnt + static_cast<std::uint32_t>(i)) % static_cast<std::uint32_t>(S)]);
    const auto pr = ref_forward(hp, w, evs);
    for (std::size_t c = 0; c < n; ++c) f.cpr[c] += static_cast<double>(pr[c]);
    ++f.wincnt;

    int cls = bundle.tie_order.front();
    for (int c : bundle.tie_order)
      if (f.cpr[static_cast<std::size_t>(c)] > f.cpr[static_cast<std::size_t>(cls)]) cls = c;
    d.category = harness::Category::rnn;
    d.cls = cls;
    const double confidence = f.cpr[static_cast<std::size_t>(cls)] / static_cast<double>(f.wincnt);
    d.conf_raw = static_cast<std::uint32_t>(std::floor(confidence * static_cast<double>(1u << hp.prob_bits)));
    d.ambiguous = confidence < t_conf[static_cast<std::size_t>(cls)];
    if (d.ambiguous) {
      ++f.esccnt;
      if (!f.esc && f.esccnt >= bundle.thresholds.t_esc) {
        f.esc = true;
        d.escalation_event = true;
      }
    }
    if (f.pktcnt % static_cast<std::uint32_t>(hp.reset_period) == 0) {
      std::fill(f.cpr.begin(), f.cpr.end(), 0.0);
      f.wincnt = 0;
      d.reset = true;
    }
    out.push_back(d);
  }
  return out;
}

DecisionDiff compare_decisions(const std::vector<harness::PacketDecision>& a,
                               const std::vector<harness::PacketDecision>& b) {
  DecisionDiff diff;
  if (a.size() != b.size()) {
    diff.mismatches = 1;
    diff.first_mismatch = "length " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
    return diff;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++diff.compared;
    const auto &x = a[i], &y = b[i];
    const bool same = x.category == y.category && x.cls == y.cls && x.ambiguous == y.ambiguous &&
                      x.escalation_event == y.escalation_event && x.reset == y.reset && x.pktcnt == y.pktcnt;
    if (!same && diff.mismatches++ == 0) {
      std::ostringstream os;
      os << "packet " << i << ": engine {" << harness::to_string(x.category) << ", cls " << x.cls << ", amb "
         << x.ambiguous << ", esc " << x.escalation_event << ", reset " << x.reset << ", pktcnt " << x.pktcnt
         << "} reference {" << harness::to_string(y.category) << ", cls " << y.cls << ", amb " << y.ambiguous
         << ", esc " << y.escalation_event << ", reset " << y.reset << ", pktcnt " << y.pktcnt << "}";
      diff.first_mismatch = os.str();
    }
  }
  return diff;
}

}  // namespace wirenn::oracles

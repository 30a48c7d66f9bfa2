#include "wirenn/harness/integrated.hpp"

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace wirenn::harness {

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::pre_analysis: return "pre_analysis";
    case Category::rnn: return "rnn";
    case Category::fallback: return "fallback";
    case Category::escalated: return "escalated";
  }
  return "?";
}

imis::Prefix synth_prefix(const PacketEvent& pkt) {
  imis::Prefix p{};
  const auto key = flow::encode(pkt.key);
  std::copy(key.begin(), key.end(), p.begin());
  p[13] = static_cast<std::uint8_t>(pkt.length >> 8);
  p[14] = static_cast<std::uint8_t>(pkt.length);
  p[15] = pkt.ttl;
  p[16] = pkt.tos;
  p[17] = pkt.tcp_offset;
  return p;
}

IntegratedEngine::IntegratedEngine(const rnn::ModelBundle& bundle, const IntegratedConfig& cfg)
    : bundle_(bundle),
      window_(bundle, window::WindowEngine::Options{cfg.cross_check_argmax}),
      table_(cfg.flow, bundle.hyper.window),
      fallback_(bundle.fallback_or_default()),
      esc_seq_(cfg.flow.n_slots, 0) {}

PacketDecision IntegratedEngine::process(const PacketEvent& pkt) {
  const auto& hp = bundle_.hyper;
  PacketDecision d;

  const flow::AdmitResult adm = table_.admit(pkt.key, pkt.time_us);
  if (!adm.admitted()) {
    d.category = Category::fallback;
    d.cls = fallback_.infer(pkt.features());
    return d;
  }
  flow::FlowSlot& slot = table_.slot(adm.slot);
  if (adm.outcome == flow::AdmitResult::Outcome::fresh) esc_seq_[adm.slot] = 0;

  if (slot.cpr.esc_flag) {
    d.category = Category::escalated;
    d.pktcnt = slot.counters.pktcnt;
    last_seq_ = esc_seq_[adm.slot]++;
    return d;
  }

  slot.counters = window::advance_counters(slot.counters, hp.window);
  d.pktcnt = slot.counters.pktcnt;
  const rnn::BitVec ev = rnn::embed_packet(bundle_, pkt.length, adm.ipd_us);
  const auto ev8 = static_cast<std::uint8_t>(ev.bits());

  if (!window::window_full(slot.counters, hp.window)) {
    slot.ring.store(slot.counters, ev8);
    d.category = Category::pre_analysis;
    d.cls = fallback_.infer(pkt.features());
    return d;
  }

  std::array<std::uint64_t, rnn::kMaxWindow> evs{};
  const std::span<std::uint64_t> win(evs.data(), static_cast<std::size_t>(hp.window));
  slot.ring.store_and_gather(slot.counters, ev8, win);
  const rnn::IntermediateResult pr = rnn::forward_window_bits(bundle_, win);
  const window::Decision wd = window_.accumulate_and_decide(slot.cpr, pr);
  d.category = Category::rnn;
  d.cls = wd.cls;
  d.ambiguous = wd.ambiguous;
  d.escalation_event = wd.escalation_event;
  d.conf_raw = window_.confidence_raw(slot.cpr.cpr[static_cast<std::size_t>(wd.cls)], slot.cpr.wincnt);
  if (wd.escalation_event) last_seq_ = esc_seq_[adm.slot]++;
  d.reset = window_.periodic_reset(slot.cpr, slot.counters.pktcnt);
  return d;
}

IntegratedResult run_integrated(const rnn::ModelBundle& bundle, const Trace& trace, const IntegratedConfig& cfg) {
  bundle.validate();
  trace.validate(bundle.hyper.n_classes);
  if (cfg.collect_records && !trace.labeled()) throw std::invalid_argument("confidence records need a labeled trace");

  IntegratedEngine engine(bundle, cfg);
  IntegratedResult res;
  auto& m = res.metrics;
  m.n_classes = bundle.hyper.n_classes;
  m.confusion = ConfusionMatrix(bundle.hyper.n_classes);
  if (cfg.keep_decisions) res.decisions.reserve(trace.packets.size());

  std::unordered_set<std::uint32_t> flows, escalated, with_fallback, rnn_flows;
  std::unordered_map<std::uint32_t, std::uint32_t> pkt_in_flow;
  for (std::size_t i = 0; i < trace.packets.size(); ++i) {
    const PacketEvent& p = trace.packets[i];
    PacketDecision d;
    try {
      d = engine.process(p);
    } catch (const std::exception& e) {
      throw std::runtime_error("packet " + std::to_string(i) + " (" + flow::to_string(p.key) + "): " + e.what());
    }
    const std::uint32_t idx_in_flow = ++pkt_in_flow[p.flow];
    ++m.packets;
    flows.insert(p.flow);
    switch (d.category) {
      case Category::escalated: ++m.packet_counts.escalated; break;
      case Category::fallback:
        ++m.packet_counts.fallback;
        with_fallback.insert(p.flow);
        break;
      case Category::pre_analysis: ++m.packet_counts.pre_analysis; break;
      case Category::rnn:
        ++m.packet_counts.rnn;
        rnn_flows.insert(p.flow);
        break;
    }
    if (d.ambiguous) ++m.ambiguous_packets;
    if (d.reset) ++m.resets;
    if (d.escalation_event) escalated.insert(p.flow);
    if (d.category != Category::escalated && p.label >= 0) m.confusion.add(p.label, d.cls);
    if (cfg.collect_records && d.category == Category::rnn)
      res.records.push_back({p.flow, idx_in_flow, d.cls, p.label, d.conf_raw});
    if (cfg.emit_escalated && (d.category == Category::escalated || d.escalation_event))
      res.escalated.push_back({p.key, p.time_us, engine.last_escalated_seq(), synth_prefix(p)});
    if (cfg.keep_decisions) res.decisions.push_back(d);
  }
  m.flows = flows.size();
  m.escalated_flows = escalated.size();
  m.flows_with_fallback = with_fallback.size();
  m.rnn_flows = rnn_flows.size();
  res.clock_regressions = engine.flows().clock_regressions();
  if (!m.partition_holds()) throw std::logic_error("packet categories do not partition the trace");
  return res;
}

std::vector<escalation::ConfidenceRecord> confidence_trace(const rnn::ModelBundle& bundle, const Trace& trace,
                                                           const IntegratedConfig& cfg) {
  if (!trace.labeled()) throw std::invalid_argument("confidence_trace: trace is not labeled");
  rnn::ModelBundle b = bundle;
  b.thresholds.t_esc = escalation::kInfeasible;
  IntegratedConfig c = cfg;
  c.collect_records = true;
  c.keep_decisions = false;
  c.emit_escalated = false;
  return run_integrated(b, trace, c).records;
}

}  // namespace wirenn::harness

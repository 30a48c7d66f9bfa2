#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "wirenn/error.hpp"
#include "wirenn/harness/config.hpp"
#include "wirenn/harness/integrated.hpp"
#include "wirenn/harness/metrics.hpp"
#include "wirenn/harness/resources.hpp"
#include "wirenn/harness/trace.hpp"
#include "wirenn/oracles/reference_pipeline.hpp"
#include "wirenn/oracles/verify.hpp"
#include "wirenn/rnn/bundle_io.hpp"

using namespace wirenn;
using harness::Category;
using harness::PacketEvent;
using harness::Trace;

namespace {

rnn::Hyperparams small_hyper() {
  rnn::Hyperparams h;
  h.window = 4;
  h.n_classes = 3;
  h.ev_width = 4;
  h.h_width = 5;
  h.len_input_bits = 8;
  h.ipd_input_bits = 8;
  h.len_embed_width = 5;
  h.ipd_embed_width = 5;
  return h;
}

PacketEvent event(std::uint64_t t, std::uint32_t src, std::uint32_t length = 100, int label = 0) {
  PacketEvent p;
  p.time_us = t;
  p.key = {src, 0x0a000002, 1234, 80, 6};
  p.length = length;
  p.label = label;
  return p;
}

/// Flow f has f + 1 packets 1 ms apart, all flows interleaved.
Trace staircase_trace(std::uint32_t flows) {
  Trace t;
  for (std::uint32_t i = 0; i < flows; ++i)
    for (std::uint32_t f = i; f < flows; ++f) t.packets.push_back(event(1000ull * i + f, 0x0b000000 + f, 60 + 7 * f, static_cast<int>(f % 3)));
  return t;
}

Trace synth(int classes, std::size_t flows, std::uint64_t seed) {
  auto spec = harness::default_synth_spec(classes);
  spec.flows = flows;
  spec.seed = seed;
  return harness::synth_trace(spec);
}

}  // namespace

TEST(TraceIo, CsvRoundTrip) {
  const Trace t = synth(3, 30, 1);
  std::stringstream ss;
  harness::write_trace_csv(ss, t);
  EXPECT_EQ(harness::read_trace_csv(ss).packets, t.packets);
}

TEST(TraceIo, BinaryRoundTrip) {
  const Trace t = synth(2, 30, 2);
  std::stringstream ss;
  harness::write_trace_binary(ss, t);
  EXPECT_EQ(harness::read_trace_binary(ss).packets, t.packets);
}

TEST(TraceIo, MalformedRows) {
  const std::string text =
      "time_us,src,dst,sport,dport,proto,length\n"
      "10,1.2.3.4,5.6.7.8,1,2,6,100\n"
      "x,1.2.3.4,5.6.7.8,1,2,6,100\n"
      "20,1.2.3.4,5.6.7.8,1,2,6\n"
      "30,1.2.3.4,5.6.7.8,1,2,17,80\n";
  std::stringstream a(text);
  harness::ReadStats st;
  const Trace t = harness::read_trace_csv(a, &st);
  EXPECT_EQ(t.packets.size(), 2u);
  EXPECT_EQ(st.malformed, 2u);
  std::stringstream b(text);
  EXPECT_THROW(harness::read_trace_csv(b), FormatError);
  std::stringstream c("time_us,src\n1,2\n");
  EXPECT_THROW(harness::read_trace_csv(c), FormatError);
}

TEST(TraceIo, Validate) {
  Trace t;
  t.packets = {event(10, 1), event(5, 1)};
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t.packets = {event(10, 1, 100, 4)};
  EXPECT_THROW(t.validate(3), std::invalid_argument);
}

TEST(SplitFlows, GapStartsNewFlow) {
  std::vector<PacketEvent> ev{event(0, 1), event(100000, 1), event(400001, 1), event(400002, 2)};
  PacketEvent icmp = event(5, 3);
  icmp.key.proto = 1;
  ev.insert(ev.begin() + 1, icmp);
  harness::SplitStats st;
  const Trace t = harness::split_flows(ev, 256000, &st);
  EXPECT_EQ(st.dropped, 1u);
  EXPECT_EQ(st.flows, 3u);
  ASSERT_EQ(t.packets.size(), 4u);
  EXPECT_EQ(t.packets[0].flow, t.packets[1].flow);
  EXPECT_NE(t.packets[1].flow, t.packets[2].flow);
  EXPECT_NE(t.packets[2].flow, t.packets[3].flow);
}

TEST(SplitFlows, ConservesTcpUdpPackets) {
  std::vector<PacketEvent> ev = synth(3, 200, 5).packets;
  for (auto& p : ev) p.flow = harness::kNoFlow;
  harness::SplitStats st;
  const Trace t = harness::split_flows(ev, 256000, &st);
  EXPECT_EQ(t.packets.size() + st.dropped, ev.size());
  EXPECT_EQ(st.input, ev.size());
}

TEST(Synth, DeterministicAndMatchesSpec) {
  auto spec = harness::default_synth_spec(3);
  spec.flows = 600;
  spec.seed = 9;
  const Trace a = harness::synth_trace(spec);
  EXPECT_EQ(a.packets, harness::synth_trace(spec).packets);
  EXPECT_TRUE(a.labeled());
  EXPECT_EQ(a.flow_count(), 600u);
  std::map<int, std::pair<double, std::size_t>> acc;
  for (const auto& p : a.packets) {
    acc[p.label].first += p.length;
    ++acc[p.label].second;
  }
  for (const auto& [c, sum] : acc) {
    const auto& cs = spec.classes[static_cast<std::size_t>(c)];
    const double mean = sum.first / static_cast<double>(sum.second);
    EXPECT_NEAR(mean, cs.len_mean, 3 * cs.len_std / std::sqrt(static_cast<double>(sum.second)) + 1.0) << c;
  }
  spec.classes = {harness::ClassSpec{}};
  EXPECT_THROW(harness::synth_trace(spec), std::invalid_argument);
  EXPECT_FALSE(harness::is_degenerate(harness::default_synth_spec(4)));
}

TEST(Replay, StartTimesFollowLoad) {
  const Trace t = synth(2, 2000, 3);
  harness::ReplayStats st;
  const Trace r = harness::replay(t, {2000, 0, 0}, &st);
  EXPECT_EQ(st.flows_released, 2000u);
  EXPECT_EQ(st.period_us, 1000000u);
  EXPECT_NEAR(st.achieved_load, 2000.0, 20.0);
  EXPECT_LE(st.window_us, 1000000u);
  EXPECT_EQ(r.packets.size(), t.packets.size());
}

TEST(Replay, PreservesOffsetsWithinFlow) {
  const Trace t = synth(2, 50, 4);
  const Trace r = harness::replay(t, {100, 0, 5000});
  std::map<std::uint32_t, std::vector<std::uint64_t>> a, b;
  for (const auto& p : t.packets) a[p.flow].push_back(p.time_us);
  for (const auto& p : r.packets) b[p.flow].push_back(p.time_us);
  ASSERT_EQ(a.size(), b.size());
  for (auto& [f, ts] : a) {
    const auto& us = b.at(f);
    ASSERT_EQ(ts.size(), us.size());
    for (std::size_t i = 1; i < ts.size(); ++i) EXPECT_EQ(ts[i] - ts[0], us[i] - us[0]);
  }
  for (std::size_t i = 1; i < r.packets.size(); ++i) EXPECT_LE(r.packets[i - 1].time_us, r.packets[i].time_us);
}

TEST(Replay, InfiniteLoadAndLooping) {
  const Trace t = synth(2, 20, 6);
  const Trace inf = harness::replay(t, {std::numeric_limits<double>::infinity(), 0, 7});
  std::map<std::uint32_t, std::uint64_t> first;
  for (const auto& p : inf.packets) first.try_emplace(p.flow, p.time_us);
  for (const auto& [f, ts] : first) EXPECT_EQ(ts, 7u);

  harness::ReplayStats st;
  const Trace looped = harness::replay(t, {100, 0.5, 0}, &st);
  EXPECT_GT(st.loops, 1u);
  EXPECT_EQ(st.flows_released, 50u);
  std::set<flow::FiveTuple> keys;
  for (const auto& p : looped.packets) keys.insert(p.key);
  std::set<flow::FiveTuple> base;
  for (const auto& p : t.packets) base.insert(p.key);
  EXPECT_GT(keys.size(), base.size());
}

TEST(Integrated, ShortFlowIsAllPreAnalysis) {
  const auto b = oracles::demo_bundle(small_hyper(), 1);
  Trace t;
  for (std::uint32_t i = 0; i < 3; ++i) t.packets.push_back(event(100 * i, 1));
  const auto res = harness::run_integrated(b, t);
  for (const auto& d : res.decisions) {
    EXPECT_EQ(d.category, Category::pre_analysis);
    EXPECT_GE(d.cls, 0);
  }
}

TEST(Integrated, ImmediateEscalation) {
  auto b = oracles::demo_bundle(small_hyper(), 1);
  b.thresholds.t_conf_raw.assign(3, 256);
  b.thresholds.t_esc = 1;
  Trace t;
  for (std::uint32_t i = 0; i < 10; ++i) t.packets.push_back(event(100 * i, 1));
  harness::IntegratedConfig cfg;
  cfg.emit_escalated = true;
  const auto res = harness::run_integrated(b, t, cfg);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(res.decisions[i].category, Category::pre_analysis);
  EXPECT_EQ(res.decisions[3].category, Category::rnn);
  EXPECT_TRUE(res.decisions[3].escalation_event);
  EXPECT_TRUE(res.decisions[3].ambiguous);
  for (std::size_t i = 4; i < 10; ++i) {
    EXPECT_EQ(res.decisions[i].category, Category::escalated);
    EXPECT_EQ(res.decisions[i].cls, -1);
  }
  EXPECT_EQ(res.escalated.size(), 7u);
  EXPECT_EQ(res.metrics.escalated_flows, 1u);
}

TEST(Integrated, PreAnalysisCountFormula) {
  auto b = oracles::demo_bundle(small_hyper(), 2);
  b.thresholds.t_esc = escalation::kInfeasible;
  const Trace t = staircase_trace(40);
  const auto res = harness::run_integrated(b, t);
  EXPECT_EQ(res.metrics.packet_counts.fallback, 0u);
  std::uint64_t expect_pre = 0, expect_rnn = 0;
  for (std::uint64_t n = 1; n <= 40; ++n) {
    expect_pre += std::min<std::uint64_t>(n, 3);
    expect_rnn += n > 3 ? n - 3 : 0;
  }
  EXPECT_EQ(res.metrics.packet_counts.pre_analysis, expect_pre);
  EXPECT_EQ(res.metrics.packet_counts.rnn, expect_rnn);
  EXPECT_TRUE(res.metrics.partition_holds());
}

TEST(Integrated, CollisionGoesToFallback) {
  const auto b = oracles::demo_bundle(small_hyper(), 3);
  Trace t;
  t.packets = {event(0, 1), event(10, 2), event(20, 1), event(300000, 2)};
  harness::IntegratedConfig cfg;
  cfg.flow.n_slots = 1;
  const auto res = harness::run_integrated(b, t, cfg);
  EXPECT_EQ(res.decisions[0].category, Category::pre_analysis);
  EXPECT_EQ(res.decisions[1].category, Category::fallback);
  EXPECT_EQ(res.decisions[1].pktcnt, 0u);
  EXPECT_EQ(res.decisions[2].pktcnt, 2u);
  // flow 1 went silent for more than the timeout, so flow 2 takes the slot
  EXPECT_EQ(res.decisions[3].category, Category::pre_analysis);
  EXPECT_EQ(res.decisions[3].pktcnt, 1u);
}

TEST(Integrated, MatchesReferencePipeline) {
  const auto b = oracles::demo_bundle(small_hyper(), 4);
  const Trace t = synth(3, 400, 8);
  harness::IntegratedConfig cfg;
  cfg.flow.n_slots = 64;
  const auto res = harness::run_integrated(b, t, cfg);
  const auto diff = oracles::compare_decisions(res.decisions, oracles::run_reference(b, t, cfg.flow));
  EXPECT_TRUE(diff.ok()) << diff.first_mismatch;
  EXPECT_EQ(diff.compared, t.packets.size());
  EXPECT_TRUE(res.metrics.partition_holds());
  EXPECT_GT(res.metrics.packet_counts.fallback, 0u);
}

TEST(Integrated, InvalidTraceNamesPacket) {
  const auto b = oracles::demo_bundle(small_hyper(), 1);
  Trace t;
  t.packets = {event(0, 1), event(1, 1, 100, 7)};
  EXPECT_THROW(harness::run_integrated(b, t), std::invalid_argument);
}

TEST(ConfidenceTrace, OneRecordPerFullWindow) {
  const auto b = oracles::demo_bundle(small_hyper(), 5);
  const Trace t = staircase_trace(30);
  const auto recs = harness::confidence_trace(b, t);
  auto no_esc = b;
  no_esc.thresholds.t_esc = escalation::kInfeasible;
  const auto res = harness::run_integrated(no_esc, t);
  EXPECT_EQ(recs.size(), res.metrics.packet_counts.rnn);
  EXPECT_EQ(recs, harness::confidence_trace(b, t));
  for (const auto& r : recs) EXPECT_LE(r.conf_raw, 15u << 4);
  Trace unlabeled = t;
  for (auto& p : unlabeled.packets) p.label = -1;
  EXPECT_THROW(harness::confidence_trace(b, unlabeled), std::invalid_argument);
}

TEST(Metrics, MacroF1MatchesDirectFormula) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 200; ++round) {
    const int n = 2 + static_cast<int>(rng() % 5);
    harness::ConfusionMatrix cm(n);
    std::vector<std::vector<double>> m(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto c = rng() % 4 == 0 ? 0 : rng() % 50;
        cm.add(i, j, c);
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<double>(c);
      }
    double sum = 0;
    int present = 0;
    for (int c = 0; c < n; ++c) {
      double tp = m[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)], fp = 0, fn = 0;
      for (int o = 0; o < n; ++o)
        if (o != c) {
          fp += m[static_cast<std::size_t>(o)][static_cast<std::size_t>(c)];
          fn += m[static_cast<std::size_t>(c)][static_cast<std::size_t>(o)];
        }
      if (tp + fp + fn == 0) continue;
      ++present;
      sum += 2 * tp / (2 * tp + fp + fn);
    }
    EXPECT_NEAR(cm.macro_f1(), present ? sum / present : 0.0, 1e-12);
  }
  EXPECT_EQ(harness::ConfusionMatrix(3).macro_f1(), 0.0);
}

TEST(Resources, StatefulBitsAndTables) {
  rnn::Hyperparams h;
  const auto r = harness::estimate_resources(h);
  EXPECT_EQ(r.ev_bits, 64);
  EXPECT_EQ(r.cpr_width, 11);
  EXPECT_EQ(r.cpr_bits, 66);
  EXPECT_EQ(r.argmax_entries, 748u);

  rnn::Hyperparams g = small_hyper();
  g.h_width = 4;
  g.ev_width = 3;
  g.window = 8;
  const auto s = harness::estimate_resources(g);
  bool found = false;
  for (const auto& t : s.exact_tables)
    if (t.name == "gru") {
      EXPECT_EQ(t.entries, 128u);
      found = true;
    }
  EXPECT_TRUE(found);
  const auto b = oracles::demo_bundle(g, 1);
  EXPECT_EQ(harness::estimate_resources(b).exact_table_bits(), s.exact_table_bits());
}

TEST(Config, ParseAndReject) {
  const auto cfg = harness::parse_config(R"({"flow": {"n_slots": 16}, "imis": {"pool_policy": "freshest"}})");
  EXPECT_EQ(cfg.flow.n_slots, 16u);
  EXPECT_EQ(cfg.imis.pool_policy, imis::PoolPolicy::freshest_first);
  EXPECT_EQ(cfg.flow.timeout_us, 256000u);
  EXPECT_THROW(harness::parse_config(R"({"flow": {"slots": 16}})"), FormatError);
  EXPECT_THROW(harness::parse_config(R"({"flow": {"n_slots": "many"}})"), FormatError);
  EXPECT_THROW(harness::parse_config("{"), FormatError);
  const auto again = harness::parse_config(harness::serialize_config(cfg));
  EXPECT_EQ(again.flow.n_slots, 16u);
  EXPECT_EQ(again.imis.pool_policy, imis::PoolPolicy::freshest_first);
}

TEST(BundleIo, RoundTripAndRecompile) {
  const auto b = oracles::demo_bundle(small_hyper(), 7);
  const auto text = rnn::serialize_bundle(b);
  const auto a = rnn::parse_bundle(text);
  EXPECT_EQ(a.hyper, b.hyper);
  EXPECT_EQ(a.tie_order, b.tie_order);
  EXPECT_EQ(a.thresholds, b.thresholds);
  EXPECT_EQ(a.tables, b.tables);
  EXPECT_EQ(a.weights, b.weights);
  ASSERT_TRUE(a.fallback.has_value());

  const auto r = rnn::parse_bundle(text, rnn::TableSource::recompile);
  EXPECT_EQ(r.tables, b.tables);

  rnn::SaveOptions no_w;
  no_w.include_weights = false;
  const auto stripped = rnn::serialize_bundle(b, no_w);
  EXPECT_FALSE(rnn::parse_bundle(stripped).weights.has_value());
  EXPECT_EQ(rnn::parse_bundle(stripped).tables, b.tables);
  EXPECT_THROW(rnn::parse_bundle(stripped, rnn::TableSource::recompile), FormatError);
  EXPECT_THROW(rnn::parse_bundle(R"({"format": "wirenn-bundle", "version": 2})"), FormatError);
}

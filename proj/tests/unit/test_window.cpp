#include <gtest/gtest.h>

#include "wirenn/oracles/window_oracle.hpp"
#include "wirenn/rnn/bundle.hpp"
#include "wirenn/window/engine.hpp"

using namespace wirenn;
using window::PacketCounters;

TEST(Counters, SaturatingAndCycling) {
  PacketCounters c;
  std::vector<std::uint32_t> c1, c2;
  for (int i = 1; i <= 10; ++i) {
    c = window::advance_counters(c, 8);
    c1.push_back(c.ctr1);
    c2.push_back(c.ctr2);
    EXPECT_EQ(c.pktcnt, static_cast<std::uint32_t>(i));
  }
  EXPECT_EQ(c1, (std::vector<std::uint32_t>{1, 2, 3, 4, 5, 6, 7, 8, 8, 8}));
  EXPECT_EQ(c2, (std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 0, 1, 2}));
}

TEST(Counters, WindowOfTwo) {
  PacketCounters c;
  for (int i = 0; i < 20; ++i) {
    c = window::advance_counters(c, 2);
    EXPECT_EQ(c.ctr2, 0u);
  }
  EXPECT_THROW(window::advance_counters(c, 1), std::invalid_argument);
}

TEST(Ring, NinthPacketWritesBinOne) {
  window::RingBuffer ring(8);
  PacketCounters c;
  std::vector<std::uint64_t> out(8);
  for (int i = 1; i <= 9; ++i) {
    c = window::advance_counters(c, 8);
    const auto ev = static_cast<std::uint8_t>(0x10 + i);
    if (window::window_full(c, 8))
      ring.store_and_gather(c, ev, out);
    else
      ring.store(c, ev);
  }
  EXPECT_EQ(ring.bin(1), 0x19);
  EXPECT_EQ(out, (std::vector<std::uint64_t>{0x12, 0x13, 0x14, 0x15, 0x16, 0x17, 0x18, 0x19}));
}

TEST(Ring, WindowOfTwoHoldsPreviousEv) {
  window::RingBuffer ring(2);
  PacketCounters c;
  std::vector<std::uint64_t> out(2);
  for (int i = 1; i <= 12; ++i) {
    c = window::advance_counters(c, 2);
    const auto ev = static_cast<std::uint8_t>(i * 3);
    if (window::window_full(c, 2)) {
      ring.store_and_gather(c, ev, out);
      EXPECT_EQ(out[0], static_cast<std::uint64_t>((i - 1) * 3));
    } else {
      ring.store(c, ev);
    }
    EXPECT_EQ(ring.bin(0), ev);
  }
}

TEST(Ring, GatherBeforeFullIsALogicError) {
  window::RingBuffer ring(4);
  PacketCounters c = window::advance_counters({}, 4);
  std::vector<std::uint64_t> out(4);
  EXPECT_THROW(ring.store_and_gather(c, 1, out), std::logic_error);
}

TEST(Ring, MatchesNaiveHistoryExhaustively) {
  for (int S : {2, 4, 8}) {
    const auto r = oracles::check_ring_exhaustive(S, S == 8 ? 3 * S : 3 * S, S == 8 ? 2 : 3);
    EXPECT_TRUE(r.ok()) << "S=" << S;
  }
  const auto r = oracles::check_ring_random(16, 60, 500, 4);
  EXPECT_TRUE(r.ok());
}

namespace {

rnn::ModelBundle three_class_bundle(std::vector<std::uint32_t> t_conf_raw, std::uint32_t t_esc = 3,
                                    std::vector<int> tie = {}) {
  rnn::Hyperparams hp;
  hp.n_classes = 3;
  hp.window = 4;
  hp.h_width = 4;
  hp.ev_width = 3;
  hp.len_input_bits = 6;
  hp.ipd_input_bits = 6;
  hp.len_embed_width = 4;
  hp.ipd_embed_width = 4;
  rnn::Thresholds th{std::move(t_conf_raw), t_esc};
  return rnn::compile_bundle(hp, rnn::random_weights(hp, 1), std::move(tie), th);
}

rnn::IntermediateResult pr3(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  rnn::IntermediateResult r;
  r.n_classes = 3;
  r.probs[0] = a;
  r.probs[1] = b;
  r.probs[2] = c;
  return r;
}

}  // namespace

TEST(Accumulate, ConfidentFirstWindow) {
  const auto b = three_class_bundle(std::vector<std::uint32_t>(3, rnn::encode_threshold(0.5, 4)));
  const window::WindowEngine eng(b);
  window::CprState st;
  const auto d = eng.accumulate_and_decide(st, pr3(15, 0, 0));
  EXPECT_EQ(d.cls, 0);
  EXPECT_FALSE(d.ambiguous);
  EXPECT_EQ(st.wincnt, 1u);
  EXPECT_EQ(st.cpr[0], 15u);
  EXPECT_EQ(eng.confidence_raw(st.cpr[0], st.wincnt), 15u << 4);
}

TEST(Accumulate, AllZeroIsAmbiguousTieOrderWinner) {
  const auto b = three_class_bundle(std::vector<std::uint32_t>(3, 1), 3, {2, 0, 1});
  const window::WindowEngine eng(b);
  window::CprState st;
  const auto d = eng.accumulate_and_decide(st, pr3(0, 0, 0));
  EXPECT_EQ(d.cls, 2);
  EXPECT_TRUE(d.ambiguous);
  EXPECT_EQ(st.esccnt, 1u);
}

TEST(Accumulate, EscalationFiresOnceAtThreshold) {
  const auto b = three_class_bundle(std::vector<std::uint32_t>(3, 15u << 4), 3);
  const window::WindowEngine eng(b);
  window::CprState st;
  int events = 0;
  for (int i = 1; i <= 6; ++i) {
    const auto d = eng.accumulate_and_decide(st, pr3(5, 5, 5));
    EXPECT_TRUE(d.ambiguous);
    events += d.escalation_event;
    if (i == 3) EXPECT_TRUE(d.escalation_event);
  }
  EXPECT_EQ(events, 1);
  EXPECT_TRUE(st.esc_flag);
}

TEST(Accumulate, ThresholdBoundaryIsNotAmbiguous) {
  // confidence exactly equal to T_conf
  const auto b = three_class_bundle(std::vector<std::uint32_t>(3, 10u << 4));
  const window::WindowEngine eng(b);
  window::CprState st;
  EXPECT_FALSE(eng.accumulate_and_decide(st, pr3(10, 2, 3)).ambiguous);
  EXPECT_TRUE(eng.is_ambiguous(19, 2, 0));
  EXPECT_FALSE(eng.is_ambiguous(20, 2, 0));
}

TEST(Accumulate, OverflowAsserts) {
  const auto b = three_class_bundle(std::vector<std::uint32_t>(3, 0));
  const window::WindowEngine eng(b);
  EXPECT_EQ(eng.cpr_width(), 11);
  EXPECT_EQ(eng.cpr_limit(), 2047u);
  window::CprState st;
  st.cpr[0] = 2040;
  EXPECT_THROW(eng.accumulate_and_decide(st, pr3(15, 0, 0)), std::logic_error);
}

TEST(Accumulate, MaxCprWithinWidth) {
  const auto b = three_class_bundle(std::vector<std::uint32_t>(3, 0));
  const window::WindowEngine eng(b);
  window::CprState st;
  for (int i = 0; i < 128; ++i) eng.accumulate_and_decide(st, pr3(15, 15, 15));
  EXPECT_EQ(st.cpr[0], 1920u);
  EXPECT_LE(st.cpr[0], eng.cpr_limit());
}

TEST(Reset, GuardedByPeriod) {
  const auto b = three_class_bundle(std::vector<std::uint32_t>(3, 0));
  const window::WindowEngine eng(b);
  window::CprState st;
  eng.accumulate_and_decide(st, pr3(3, 4, 5));
  st.esccnt = 7;
  st.esc_flag = true;
  const auto before = st;
  EXPECT_FALSE(eng.periodic_reset(st, 127));
  EXPECT_EQ(st, before);
  EXPECT_TRUE(eng.periodic_reset(st, 128));
  EXPECT_EQ(st.wincnt, 0u);
  EXPECT_EQ(st.cpr[1], 0u);
  EXPECT_EQ(st.esccnt, 7u);
  EXPECT_TRUE(st.esc_flag);
  for (std::uint32_t k = 2; k < 10; ++k) eng.periodic_reset(st, 128 * k);
  EXPECT_TRUE(st.esc_flag);
}

TEST(SoftwareArgmax, TieOrder) {
  const std::uint32_t v[] = {4, 9, 9};
  const int order[] = {2, 1, 0};
  EXPECT_EQ(window::software_argmax(v, order), 2);
  const int order2[] = {0, 1, 2};
  EXPECT_EQ(window::software_argmax(v, order2), 1);
}

#include <gtest/gtest.h>

#include <cstring>

#include "wirenn/flow/flow_table.hpp"
#include "wirenn/flow/hash.hpp"

using namespace wirenn;
using flow::FiveTuple;

namespace {

std::uint32_t murmur_str(const char* s, std::uint32_t seed) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(s);
  return flow::murmur3_32(std::span<const std::uint8_t>(p, std::strlen(s)), seed);
}

FiveTuple tuple(std::uint16_t sport, std::uint32_t src = 0x0a000001) { return {src, 0xc0a80001, sport, 443, 6}; }

}  // namespace

TEST(Murmur3, ReferenceVectors) {
  EXPECT_EQ(murmur_str("", 0), 0u);
  EXPECT_EQ(murmur_str("", 1), 0x514e28b7u);
  EXPECT_EQ(murmur_str("", 0xffffffffu), 0x81f16f39u);
  EXPECT_EQ(murmur_str("hello", 0), 0x248bfa47u);
  EXPECT_EQ(murmur_str("The quick brown fox jumps over the lazy dog", 0), 0x2e4ff723u);
}

TEST(FiveTupleCodec, RoundTripAndByteOrder) {
  const FiveTuple t{0x01020304, 0x05060708, 0x090a, 0x0b0c, 17};
  const auto b = flow::encode(t);
  EXPECT_EQ(b[0], 1);
  EXPECT_EQ(b[8], 0x09);
  EXPECT_EQ(b[12], 17);
  EXPECT_EQ(flow::decode(b), t);
  EXPECT_EQ(flow::format_ipv4(0x0a000001), "10.0.0.1");
  EXPECT_EQ(flow::parse_ipv4("192.168.0.1"), 0xc0a80001u);
  EXPECT_THROW(flow::parse_ipv4("1.2.3"), std::invalid_argument);
  EXPECT_THROW(flow::parse_ipv4("1.2.3.256"), std::invalid_argument);
}

TEST(FlowTable, EmptyTableAdmitsFresh) {
  flow::FlowTable ft({}, 8);
  const auto r = ft.admit(tuple(1000), 12345);
  EXPECT_EQ(r.outcome, flow::AdmitResult::Outcome::fresh);
  EXPECT_EQ(r.ipd_us, 0u);
}

TEST(FlowTable, CollisionFoundBySearchFallsBack) {
  flow::FlowTableConfig cfg;
  flow::FlowTable ft(cfg, 8);
  const FiveTuple a = tuple(1000);
  const std::uint32_t target = ft.index_of(a);
  FiveTuple b{};
  bool found = false;
  for (std::uint32_t src = 0x0b000000; src < 0x0b000000 + (1u << 24) && !found; ++src) {
    b = tuple(1000, src);
    found = ft.index_of(b) == target && ft.true_id_of(b) != ft.true_id_of(a);
  }
  ASSERT_TRUE(found);
  EXPECT_EQ(ft.admit(a, 0).outcome, flow::AdmitResult::Outcome::fresh);
  EXPECT_EQ(ft.admit(b, 1000).outcome, flow::AdmitResult::Outcome::fallback);
  EXPECT_EQ(ft.admit(a, 2000).outcome, flow::AdmitResult::Outcome::existing);
  // b takes the slot once a has been silent for the timeout
  EXPECT_EQ(ft.admit(b, 2000 + cfg.timeout_us).outcome, flow::AdmitResult::Outcome::fresh);
}

TEST(FlowTable, ForcedIndexHashCollision) {
  flow::FlowTable ft({}, 4);
  ft.set_index_hash([](const FiveTuple&) { return 7u; });
  EXPECT_EQ(ft.admit(tuple(1), 0).outcome, flow::AdmitResult::Outcome::fresh);
  EXPECT_EQ(ft.admit(tuple(2), 10).outcome, flow::AdmitResult::Outcome::fallback);
}

TEST(FlowTable, TimeoutReinitializesState) {
  flow::FlowTableConfig cfg;
  flow::FlowTable ft(cfg, 4);
  const auto key = tuple(5);
  const auto r = ft.admit(key, 0);
  auto& s = ft.slot(r.slot);
  s.counters = window::advance_counters(s.counters, 4);
  s.ring.store(s.counters, 0x5);
  s.cpr.cpr[0] = 99;
  s.cpr.wincnt = 3;
  s.cpr.esc_flag = true;

  const auto same = ft.admit(key, cfg.timeout_us - 1);
  EXPECT_EQ(same.outcome, flow::AdmitResult::Outcome::existing);
  EXPECT_EQ(same.ipd_us, cfg.timeout_us - 1);

  const auto again = ft.admit(key, 2 * cfg.timeout_us);
  EXPECT_EQ(again.outcome, flow::AdmitResult::Outcome::fresh);
  const auto& z = ft.slot(again.slot);
  EXPECT_EQ(z.counters, window::PacketCounters{});
  EXPECT_EQ(z.ring, window::RingBuffer(4));
  EXPECT_EQ(z.cpr, window::CprState{});
}

TEST(FlowTable, InterPacketDelay) {
  flow::FlowTable ft({}, 4);
  EXPECT_EQ(ft.admit(tuple(9), 100).ipd_us, 0u);
  EXPECT_EQ(ft.admit(tuple(9), 350).ipd_us, 250u);
}

TEST(FlowTable, ClockRegressionClampsAndCounts) {
  flow::FlowTable ft({}, 4);
  ft.admit(tuple(9), 1000);
  const auto r = ft.admit(tuple(9), 900);
  EXPECT_EQ(r.outcome, flow::AdmitResult::Outcome::existing);
  EXPECT_EQ(r.ipd_us, 0u);
  EXPECT_EQ(ft.clock_regressions(), 1u);
  EXPECT_EQ(ft.admit(tuple(9), 1100).ipd_us, 100u);
}

TEST(FlowTable, ZeroSlotsRejected) {
  flow::FlowTableConfig cfg;
  cfg.n_slots = 0;
  EXPECT_THROW(flow::FlowTable(cfg, 4), std::invalid_argument);
}

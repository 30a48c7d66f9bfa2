#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "wirenn/escalation/calibration.hpp"

using namespace wirenn;
using escalation::ConfidenceRecord;

namespace {

constexpr int kPb = 4;
constexpr std::uint32_t kFull = 15u << kPb;

std::vector<ConfidenceRecord> mixed_records(std::size_t flows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ConfidenceRecord> out;
  for (std::uint32_t f = 0; f < flows; ++f) {
    const int truth = static_cast<int>(rng() % 3);
    const bool hard = rng() % 5 == 0;
    const auto n = static_cast<std::uint32_t>(5 + rng() % 30);
    for (std::uint32_t i = 1; i <= n; ++i) {
      const bool correct = hard ? rng() % 3 == 0 : rng() % 10 != 0;
      const int pred = correct ? truth : static_cast<int>((truth + 1 + rng() % 2) % 3);
      const std::uint32_t conf = correct ? static_cast<std::uint32_t>(120 + rng() % 121) : static_cast<std::uint32_t>(40 + rng() % 120);
      out.push_back({f, i, pred, truth, conf});
    }
  }
  return out;
}

}  // namespace

TEST(Calibrate, SeparableConfidences) {
  std::vector<ConfidenceRecord> recs;
  for (std::uint32_t f = 0; f < 20; ++f)
    for (std::uint32_t i = 1; i <= 10; ++i) recs.push_back({f, i, 1, 1, kFull});
  const auto r = escalation::calibrate(recs, 0.05, 3, kPb);
  ASSERT_TRUE(r.feasible);
  EXPECT_GT(r.t_conf_raw[1], 0u);
  EXPECT_LE(r.t_conf_raw[1], kFull);
  EXPECT_EQ(escalation::replay_escalation(recs, r.t_conf_raw, 1).escalated_flows, 0u);
}

TEST(Calibrate, ClosedLoopMeetsTarget) {
  const auto recs = mixed_records(2000, 7);
  for (double target : {0.01, 0.05, 0.2}) {
    const auto r = escalation::calibrate(recs, target, 3, kPb);
    ASSERT_TRUE(r.feasible);
    const auto rep = escalation::replay_escalation(recs, r.t_conf_raw, r.t_esc);
    EXPECT_LE(rep.fraction(), target);
    EXPECT_DOUBLE_EQ(rep.fraction(), r.escalated_fraction);
    if (r.t_esc > 1) EXPECT_GT(escalation::replay_escalation(recs, r.t_conf_raw, r.t_esc - 1).fraction(), target);
  }
}

TEST(Calibrate, CorrectLossBudget) {
  const auto recs = mixed_records(1000, 3);
  escalation::CalibrationOptions opts;
  opts.correct_loss_budget = 0.02;
  const auto r = escalation::calibrate(recs, 0.5, 3, kPb, opts);
  for (int c = 0; c < 3; ++c) {
    std::size_t correct = 0, below = 0;
    for (const auto& x : recs)
      if (x.correct() && x.predicted == c) {
        ++correct;
        below += x.conf_raw < r.t_conf_raw[static_cast<std::size_t>(c)];
      }
    EXPECT_LE(static_cast<double>(below), 0.02 * static_cast<double>(correct));
  }
}

TEST(Calibrate, MonotoneInTesc) {
  const auto recs = mixed_records(500, 11);
  const auto r = escalation::calibrate(recs, 0.05, 3, kPb);
  double prev = 1.0;
  for (std::uint32_t t = 1; t < 40; ++t) {
    const double f = escalation::replay_escalation(recs, r.t_conf_raw, t).fraction();
    EXPECT_LE(f, prev);
    prev = f;
  }
}

TEST(Calibrate, InfeasibleSentinel) {
  std::vector<ConfidenceRecord> recs;
  for (std::uint32_t f = 0; f < 10; ++f)
    for (std::uint32_t i = 1; i <= 30; ++i) recs.push_back({f, i, 0, 1, 0});
  escalation::CalibrationOptions opts;
  opts.max_t_esc = 5;
  const auto r = escalation::calibrate(recs, 0.05, 2, kPb, opts);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.t_esc, escalation::kInfeasible);
}

TEST(Calibrate, InputErrors) {
  const std::vector<ConfidenceRecord> none;
  EXPECT_THROW(escalation::calibrate(none, 0.05, 2, kPb), std::invalid_argument);
  const std::vector<ConfidenceRecord> one{{0, 1, 0, 0, 5}};
  EXPECT_THROW(escalation::calibrate(one, 0.0, 2, kPb), std::invalid_argument);
  EXPECT_THROW(escalation::calibrate(one, 1.5, 2, kPb), std::invalid_argument);
}

TEST(Calibrate, EscalationIsCausal) {
  // a flow escalates as soon as the count reaches T_esc, whatever comes later
  const std::vector<std::uint32_t> t_conf{100, 100};
  std::vector<ConfidenceRecord> recs{{0, 1, 0, 0, 50}, {0, 2, 0, 0, 50}, {0, 3, 0, 0, 200}};
  EXPECT_EQ(escalation::replay_escalation(recs, t_conf, 2).escalated_flows, 1u);
  recs.resize(1);
  EXPECT_EQ(escalation::replay_escalation(recs, t_conf, 2).escalated_flows, 0u);
}

TEST(Records, TextRoundTrip) {
  const auto recs = mixed_records(20, 1);
  std::stringstream ss;
  escalation::write_records(ss, recs);
  EXPECT_EQ(escalation::read_records(ss), recs);
  std::stringstream bad("flow pkt_idx predicted truth conf_raw\n1 2 x 0 5\n");
  EXPECT_ANY_THROW(escalation::read_records(bad));
}

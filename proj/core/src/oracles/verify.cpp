#include "wirenn/oracles/verify.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "wirenn/harness/integrated.hpp"
#include "wirenn/oracles/argmax_oracle.hpp"
#include "wirenn/oracles/imis_reference.hpp"
#include "wirenn/oracles/reference_pipeline.hpp"
#include "wirenn/oracles/rnn_oracle.hpp"
#include "wirenn/oracles/window_oracle.hpp"

namespace wirenn::oracles {

rnn::ModelBundle demo_bundle(const rnn::Hyperparams& hyper, std::uint64_t seed, double t_conf, std::uint32_t t_esc) {
  rnn::Thresholds th;
  th.t_conf_raw.assign(static_cast<std::size_t>(hyper.n_classes), rnn::encode_threshold(t_conf * ((1 << hyper.prob_bits) - 1), hyper.prob_bits));
  th.t_esc = t_esc;
  rnn::ModelBundle b = rnn::compile_bundle(hyper, rnn::random_weights(hyper, seed), {}, th);
  b.fallback = random_forest(hyper.n_classes, 3, 4, seed ^ 0x5eedu);
  return b;
}

tree::TreeModel random_forest(int n_classes, int n_trees, int depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> feat(0, static_cast<int>(tree::kFeatureCount) - 1);
  std::uniform_real_distribution<double> vote(0.0, 1.0);
  const std::array<std::int64_t, tree::kFeatureCount> range{1500, 255, 255, 15, 17};
  std::vector<tree::DecisionTree> trees;
  for (int t = 0; t < n_trees; ++t) {
    tree::DecisionTree dt;
    const int n_internal = (1 << depth) - 1;
    const int n_nodes = (1 << (depth + 1)) - 1;
    dt.nodes.resize(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
      auto& nd = dt.nodes[static_cast<std::size_t>(i)];
      if (i < n_internal) {
        nd.leaf = false;
        nd.feature = static_cast<tree::Feature>(feat(rng));
        std::uniform_int_distribution<std::int64_t> thr(0, range[static_cast<std::size_t>(nd.feature)]);
        nd.threshold = thr(rng);
        nd.left = 2 * i + 1;
        nd.right = 2 * i + 2;
      } else {
        for (int c = 0; c < n_classes; ++c) nd.votes.push_back(vote(rng));
      }
    }
    trees.push_back(std::move(dt));
  }
  return tree::TreeModel(n_classes, depth, std::move(trees));
}

std::vector<imis::EscalatedPacket> stream_from_trace(const harness::Trace& trace) {
  std::vector<imis::EscalatedPacket> out;
  std::map<flow::FiveTuple, std::uint32_t> seq;
  out.reserve(trace.packets.size());
  for (const auto& p : trace.packets) out.push_back({p.key, p.time_us, seq[p.key]++, harness::synth_prefix(p)});
  return out;
}

namespace {

VerifyCheck from_result(std::string name, const CheckResult& r) {
  std::ostringstream os;
  os << r.checked << " checked, " << r.mismatches << " mismatches";
  if (!r.first_mismatch.empty()) os << "; first: " << r.first_mismatch;
  return {std::move(name), r.ok(), os.str()};
}

VerifyCheck argmax_counts() {
  std::uint64_t checked = 0;
  std::string bad;
  const argmax::OptLevel levels[] = {argmax::OptLevel::base, argmax::OptLevel::opt1, argmax::OptLevel::opt2,
                                     argmax::OptLevel::opt1_opt2};
  for (int n = 1; n <= 6; ++n)
    for (int m = 1; m <= 6; ++m)
      for (auto lv : levels) {
        ++checked;
        const auto got = argmax::count_entries(n, m, lv);
        if (got != recurrence_count(n, m, lv) && bad.empty())
          bad = "n=" + std::to_string(n) + " m=" + std::to_string(m) + " " + std::string(argmax::to_string(lv));
        if (lv == argmax::OptLevel::opt1_opt2) {
          std::uint64_t closed = static_cast<std::uint64_t>(n);
          for (int i = 1; i < n; ++i) closed *= static_cast<std::uint64_t>(m);
          if (got != closed && bad.empty()) bad = "closed form n=" + std::to_string(n) + " m=" + std::to_string(m);
        }
      }
  return {"argmax.counts", bad.empty(), std::to_string(checked) + " (n, m, level) cases" + (bad.empty() ? "" : "; " + bad)};
}

VerifyCheck argmax_tables() {
  CheckResult total;
  const std::pair<int, int> shapes[] = {{2, 6}, {3, 4}, {4, 3}, {5, 2}, {6, 2}};
  const argmax::OptLevel levels[] = {argmax::OptLevel::base, argmax::OptLevel::opt1, argmax::OptLevel::opt2,
                                     argmax::OptLevel::opt1_opt2};
  for (auto [n, m] : shapes)
    for (auto lv : levels) {
      auto order = argmax::default_tie_order(n);
      std::reverse(order.begin(), order.end());
      for (const auto& tie : {argmax::default_tie_order(n), order}) {
        const auto r = check_table_exhaustive(argmax::generate_table(n, m, tie, lv));
        total.checked += r.checked;
        total.mismatches += r.mismatches;
        if (total.first_mismatch.empty()) total.first_mismatch = r.first_mismatch;
      }
    }
  return from_result("argmax.tables", total);
}

}  // namespace

std::vector<VerifyCheck> run_verify(const rnn::ModelBundle& bundle, const VerifyOptions& opts) {
  bundle.validate();
  const auto& hp = bundle.hyper;
  std::vector<VerifyCheck> out;
  out.push_back(argmax_counts());
  out.push_back(argmax_tables());

  const auto chain = argmax::split_argmax(hp.n_classes, hp.cpr_width(), hp.argmax_fan, bundle.tie_order);
  out.push_back(from_result("argmax.chain", check_chain_random(chain, opts.samples, opts.seed)));

  {
    const auto ex = check_ring_exhaustive(4, 7, 3);
    const auto rnd = check_ring_random(hp.window, 3 * hp.window + 5, 200, opts.seed);
    const bool ok = ex.ok() && rnd.ok();
    out.push_back({"window.ring", ok,
                   std::to_string(ex.windows + rnd.windows) + " windows, " +
                       std::to_string(ex.mismatches + rnd.mismatches) + " mismatches"});
  }

  {
    const tree::TreeModel model = bundle.fallback_or_default();
    const RuleList rules(model);
    std::mt19937_64 rng(opts.seed);
    std::uint64_t bad = 0;
    for (std::uint64_t i = 0; i < opts.samples; ++i) {
      const auto f = tree::PacketFeatures::make(static_cast<std::uint32_t>(rng() % 1600), static_cast<std::uint32_t>(rng() % 256),
                                                static_cast<std::uint32_t>(rng() % 256), static_cast<std::uint32_t>(rng() % 16),
                                                (rng() & 1) ? 6u : 17u);
      if (model.infer(f) != rules.infer(f)) ++bad;
    }
    out.push_back({"tree.rules", bad == 0,
                   std::to_string(opts.samples) + " packets against " + std::to_string(rules.size()) + " rules, " +
                       std::to_string(bad) + " mismatches"});
  }

  if (!bundle.weights) {
    out.push_back({"rnn.tables", false, "bundle carries no weights"});
    out.push_back({"rnn.forward", false, "bundle carries no weights"});
    out.push_back({"pipeline.reference", false, "bundle carries no weights"});
  } else {
    CheckResult tables;
    std::string names;
    for (const auto& tc : check_bundle_tables(bundle, 22, opts.samples, opts.seed)) {
      tables.checked += tc.result.checked;
      tables.mismatches += tc.result.mismatches;
      if (tables.first_mismatch.empty() && !tc.result.ok()) tables.first_mismatch = tc.name + ": " + tc.result.first_mismatch;
    }
    out.push_back(from_result("rnn.tables", tables));
    out.push_back(from_result("rnn.forward", check_forward_random(bundle, opts.samples, opts.seed)));

    auto spec = harness::default_synth_spec(hp.n_classes);
    spec.flows = opts.trace_flows;
    spec.seed = opts.seed;
    const harness::Trace trace = harness::synth_trace(spec);
    harness::IntegratedConfig cfg;
    cfg.flow.n_slots = 256;  // forces collisions
    const auto res = harness::run_integrated(bundle, trace, cfg);
    const auto diff = compare_decisions(res.decisions, run_reference(bundle, trace, cfg.flow));
    std::ostringstream os;
    os << diff.compared << " packets (" << res.metrics.packet_counts.rnn << " rnn, " << res.metrics.packet_counts.fallback
       << " fallback, " << res.metrics.packet_counts.escalated << " escalated), " << diff.mismatches << " mismatches";
    if (!diff.first_mismatch.empty()) os << "; first: " << diff.first_mismatch;
    out.push_back({"pipeline.reference", diff.ok(), os.str()});
  }

  {
    auto spec = harness::default_synth_spec(hp.n_classes);
    spec.flows = opts.trace_flows;
    spec.seed = opts.seed + 1;
    spec.flow_rate = 4000;
    const auto stream = stream_from_trace(harness::synth_trace(spec));
    const auto clf = imis::hash_classifier(hp.n_classes, 3);
    std::uint64_t compared = 0, bad = 0;
    for (auto policy : {imis::PoolPolicy::oldest_first, imis::PoolPolicy::freshest_first}) {
      imis::SimConfig sc;
      sc.ingress_capacity = sc.pool_capacity = sc.buffer_capacity = sc.result_capacity = imis::kUnbounded;
      sc.pool_policy = policy;
      sc.batch_size = 8;
      sc.parse_us = 1;
      sc.pool_us = 2;
      sc.buffer_us = 1;
      sc.infer_base_us = 300;
      sc.infer_per_flow_us = 20;
      const auto des = imis::run_pipeline(stream, clf, sc);
      const auto ref = reference_schedule(stream, clf, sc);
      compared += des.log.size();
      if (des.log != ref.log || des.stats.batches != ref.stats.batches) ++bad;
    }
    out.push_back({"imis.reference", bad == 0,
                   std::to_string(compared) + " releases over 2 pool policies, " + std::to_string(bad) + " differing logs"});
  }
  return out;
}

void write_checks(std::ostream& os, const std::vector<VerifyCheck>& checks) {
  for (const auto& c : checks) os << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.detail << '\n';
}

}  // namespace wirenn::oracles

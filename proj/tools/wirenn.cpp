// wirenn: command-line front end for the data-plane emulator.
//
// Exit codes: 0 success, 1 validation failure (bad input, infeasible
// calibration, failed self-check), 2 runtime error, 3 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wirenn/argmax/chain.hpp"
#include "wirenn/argmax/ternary.hpp"
#include "wirenn/error.hpp"
#include "wirenn/escalation/calibration.hpp"
#include "wirenn/harness/config.hpp"
#include "wirenn/harness/integrated.hpp"
#include "wirenn/harness/resources.hpp"
#include "wirenn/harness/trace.hpp"
#include "wirenn/imis/simulator.hpp"
#include "wirenn/oracles/verify.hpp"
#include "wirenn/rnn/bundle_io.hpp"

namespace {

using namespace wirenn;

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;
constexpr int kUsage = 3;

/// Failed check or infeasible result; not an exception in the library sense.
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("not an integer list: " + s);
    }
  }
  return out;
}

double parse_load(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad load: " + s);
  }
}

struct Globals {
  std::string config_path;
  harness::RunConfig cfg;
};

// ---- gen-argmax

struct GenArgmaxArgs {
  int n = 0, m = 0, fan = 0;
  std::string level = "opt1+opt2";
  std::string tie_order;
  std::string out;
  bool count_only = false;
};

void cmd_gen_argmax(const GenArgmaxArgs& a) {
  const auto level = argmax::parse_opt_level(a.level);
  const auto tie = a.tie_order.empty() ? argmax::default_tie_order(a.n) : parse_int_list(a.tie_order);
  if (a.count_only) {
    const auto count = a.fan > 0 ? argmax::chain_entry_count(a.n, a.m, a.fan, level) : argmax::count_entries(a.n, a.m, level);
    std::cout << count << '\n';
    return;
  }
  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& os = a.out.empty() ? std::cout : file;
  if (a.fan > 0 && a.fan < a.n) {
    const auto chain = argmax::split_argmax(a.n, a.m, a.fan, tie, level);
    for (std::size_t i = 0; i < chain.stages().size(); ++i) {
      const auto& st = chain.stages()[i];
      std::cerr << "stage " << i << ": " << st.operands.size() << " operands, " << st.table.size() << " entries\n";
      argmax::write_table(os, st.table);
    }
    std::cerr << "total " << chain.total_entries() << " entries\n";
  } else {
    const auto table = argmax::generate_table(a.n, a.m, tie, level);
    argmax::write_table(os, table);
    std::cerr << table.size() << " entries\n";
  }
}

// ---- hyperparameter overrides shared by compile / estimate / verify

struct HyperFlags {
  std::optional<int> window, classes, ev_width, h_width, prob_bits, reset_period, fan;
  std::optional<bool> merged;

  void add(CLI::App* app) {
    app->add_option("--window", window, "Window size S");
    app->add_option("--classes", classes, "Number of classes");
    app->add_option("--ev-width", ev_width, "Embedding vector width");
    app->add_option("--h-width", h_width, "GRU hidden width");
    app->add_option("--prob-bits", prob_bits, "Bits per quantized probability");
    app->add_option("--reset-period", reset_period, "CPR reset period K");
    app->add_option("--argmax-fan", fan, "Operands per argmax stage");
    app->add_option("--merged", merged, "Merge the first two GRU steps (and the output layer)");
  }
  rnn::Hyperparams apply(rnn::Hyperparams h) const {
    if (window) h.window = *window;
    if (classes) h.n_classes = *classes;
    if (ev_width) h.ev_width = *ev_width;
    if (h_width) h.h_width = *h_width;
    if (prob_bits) h.prob_bits = *prob_bits;
    if (reset_period) h.reset_period = *reset_period;
    if (fan) h.argmax_fan = *fan;
    if (merged) h.merged = *merged;
    h.validate();
    return h;
  }
};

// ---- compile

struct CompileArgs {
  HyperFlags hyper;
  std::string weights, fallback, out, tie_order;
  std::optional<std::uint64_t> random_seed;
  std::optional<double> t_conf;
  std::optional<std::uint32_t> t_conf_raw, t_esc;
  bool no_weights = false;
};

void cmd_compile(const Globals& g, const CompileArgs& a) {
  rnn::ModelBundle b;
  if (!a.weights.empty()) {
    b = rnn::load_bundle(a.weights, rnn::TableSource::recompile);
  } else if (a.random_seed) {
    const auto hp = a.hyper.apply(g.cfg.hyper);
    b = rnn::compile_bundle(hp, rnn::random_weights(hp, *a.random_seed));
  } else {
    throw std::invalid_argument("compile needs --weights or --random-seed");
  }
  if (!a.tie_order.empty()) {
    b.tie_order = parse_int_list(a.tie_order);
    argmax::validate_tie_order(b.tie_order, b.hyper.n_classes);
  }
  const auto n = static_cast<std::size_t>(b.hyper.n_classes);
  if (a.t_conf) b.thresholds.t_conf_raw.assign(n, rnn::encode_threshold(*a.t_conf, b.hyper.prob_bits));
  if (a.t_conf_raw) b.thresholds.t_conf_raw.assign(n, *a.t_conf_raw);
  if (a.t_esc) b.thresholds.t_esc = *a.t_esc;
  if (!a.fallback.empty()) {
    std::ifstream is(a.fallback);
    if (!is) throw std::runtime_error("cannot open " + a.fallback);
    std::stringstream ss;
    ss << is.rdbuf();
    b.fallback = rnn::parse_tree(ss.str());
  }
  b.validate();
  rnn::save_bundle(a.out, b, rnn::SaveOptions{!a.no_weights, 1});
  harness::write_resources(std::cout, harness::estimate_resources(b), g.cfg.flow.n_slots);
}

// ---- synth

struct SynthArgs {
  std::optional<int> classes;
  std::optional<std::size_t> flows;
  std::optional<double> rate, separation;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> min_packets, max_packets;
  std::string out;
};

void cmd_synth(const Globals& g, const SynthArgs& a) {
  auto o = g.cfg.synth;
  if (a.classes) o.classes = *a.classes;
  if (a.flows) o.flows = *a.flows;
  if (a.rate) o.flow_rate = *a.rate;
  if (a.separation) o.separation = *a.separation;
  if (a.seed) o.seed = *a.seed;
  auto spec = harness::default_synth_spec(o.classes, o.separation);
  spec.flows = o.flows;
  spec.flow_rate = o.flow_rate;
  spec.seed = o.seed;
  for (auto& c : spec.classes) {
    if (a.min_packets) c.min_packets = *a.min_packets;
    if (a.max_packets) c.max_packets = *a.max_packets;
  }
  if (harness::is_degenerate(spec)) std::cerr << "warning: two classes share identical parameters\n";
  const auto trace = harness::synth_trace(spec);
  harness::save_trace(a.out, trace);
  std::cout << "packets " << trace.packets.size() << "\nflows " << trace.flow_count() << "\nduration_us "
            << trace.duration_us() << '\n';
}

// ---- split-flows

struct SplitArgs {
  std::string in, out;
  std::optional<std::uint64_t> gap_us;
};

void cmd_split(const Globals& g, const SplitArgs& a) {
  harness::ReadStats rs;
  const auto raw = harness::load_trace(a.in, &rs);
  harness::SplitStats ss;
  const auto trace = harness::split_flows(raw.packets, a.gap_us.value_or(g.cfg.split_gap_us), &ss);
  harness::save_trace(a.out, trace);
  std::cout << "input " << ss.input << "\nmalformed " << rs.malformed << "\ndropped " << ss.dropped << "\nflows "
            << ss.flows << "\npackets " << trace.packets.size() << '\n';
}

// ---- replay

struct ReplayArgs {
  std::string in, out, load;
  std::optional<double> duration_s;
  std::optional<std::uint64_t> start_us;
};

harness::ReplayConfig replay_config(const Globals& g, const std::string& load, std::optional<double> duration_s,
                                    std::optional<std::uint64_t> start_us) {
  auto rc = g.cfg.replay;
  if (!load.empty()) rc.load = parse_load(load);
  if (duration_s) rc.duration_s = *duration_s;
  if (start_us) rc.start_us = *start_us;
  return rc;
}

void write_replay_stats(std::ostream& os, const harness::ReplayStats& st) {
  os << "flows_released " << st.flows_released << "\nloops " << st.loops << "\nperiod_us " << st.period_us
     << "\nwindow_us " << st.window_us << "\nachieved_load " << st.achieved_load << '\n';
}

void cmd_replay(const Globals& g, const ReplayArgs& a) {
  const auto trace = harness::load_trace(a.in);
  harness::ReplayStats st;
  const auto out = harness::replay(trace, replay_config(g, a.load, a.duration_s, a.start_us), &st);
  harness::save_trace(a.out, out);
  write_replay_stats(std::cout, st);
}

// ---- run

struct FlowFlags {
  std::optional<std::uint32_t> slots;
  std::optional<std::uint64_t> timeout_us;
  bool no_cross_check = false;

  void add(CLI::App* app) {
    app->add_option("--slots", slots, "Flow table slots");
    app->add_option("--timeout-us", timeout_us, "Flow idle timeout");
    app->add_flag("--no-cross-check", no_cross_check, "Skip the software argmax cross-check");
  }
  harness::IntegratedConfig apply(const harness::RunConfig& cfg) const {
    harness::IntegratedConfig ic;
    ic.flow = cfg.flow;
    if (slots) ic.flow.n_slots = *slots;
    if (timeout_us) ic.flow.timeout_us = *timeout_us;
    ic.cross_check_argmax = cfg.cross_check_argmax && !no_cross_check;
    return ic;
  }
};

struct RunArgs {
  std::string bundle, trace, load, escalated_out, decisions_out, records_out, metrics_out;
  FlowFlags flow;
};

void cmd_run(const Globals& g, const RunArgs& a) {
  const auto bundle = rnn::load_bundle(a.bundle);
  auto trace = harness::load_trace(a.trace);
  if (!a.load.empty()) trace = harness::replay(trace, replay_config(g, a.load, std::nullopt, std::nullopt));
  auto ic = a.flow.apply(g.cfg);
  ic.keep_decisions = !a.decisions_out.empty();
  ic.emit_escalated = !a.escalated_out.empty();
  ic.collect_records = !a.records_out.empty();
  const auto res = harness::run_integrated(bundle, trace, ic);

  if (!a.metrics_out.empty()) {
    auto os = open_out(a.metrics_out);
    harness::write_metrics(os, res.metrics);
  }
  harness::write_metrics(std::cout, res.metrics);
  if (res.clock_regressions > 0) std::cerr << "warning: " << res.clock_regressions << " clock regressions\n";
  if (ic.emit_escalated) imis::save_stream(a.escalated_out, res.escalated);
  if (ic.collect_records) escalation::save_records(a.records_out, res.records);
  if (ic.keep_decisions) {
    auto os = open_out(a.decisions_out);
    os << "index,category,class,ambiguous,escalation_event,reset,pktcnt,conf_raw\n";
    for (std::size_t i = 0; i < res.decisions.size(); ++i) {
      const auto& d = res.decisions[i];
      os << i << ',' << harness::to_string(d.category) << ',' << d.cls << ',' << d.ambiguous << ','
         << d.escalation_event << ',' << d.reset << ',' << d.pktcnt << ',' << d.conf_raw << '\n';
    }
  }
}

// ---- calibrate

struct CalibrateArgs {
  std::string bundle, trace, records, out, records_out;
  std::optional<double> target, budget;
  std::optional<std::uint32_t> max_t_esc;
  FlowFlags flow;
};

void cmd_calibrate(const Globals& g, const CalibrateArgs& a) {
  auto bundle = rnn::load_bundle(a.bundle);
  std::vector<escalation::ConfidenceRecord> records;
  if (!a.records.empty()) {
    records = escalation::load_records(a.records);
  } else if (!a.trace.empty()) {
    records = harness::confidence_trace(bundle, harness::load_trace(a.trace), a.flow.apply(g.cfg));
  } else {
    throw std::invalid_argument("calibrate needs --trace or --records");
  }
  if (!a.records_out.empty()) escalation::save_records(a.records_out, records);

  auto opts = g.cfg.calibration;
  if (a.budget) opts.correct_loss_budget = *a.budget;
  if (a.max_t_esc) opts.max_t_esc = *a.max_t_esc;
  const double target = a.target.value_or(g.cfg.calibrate_target);
  const auto r = escalation::calibrate(records, target, bundle.hyper.n_classes, bundle.hyper.prob_bits, opts);

  std::cout << "records " << records.size() << "\nflows " << r.flows << "\nt_conf_raw";
  for (auto t : r.t_conf_raw) std::cout << ' ' << t;
  std::cout << "\nt_esc " << r.t_esc << "\nescalated_fraction " << r.escalated_fraction << "\nfeasible "
            << (r.feasible ? "yes" : "no") << '\n';
  if (!r.feasible) throw ValidationFailure("no T_esc up to " + std::to_string(opts.max_t_esc) + " meets target " +
                                           std::to_string(target));
  if (!a.out.empty()) {
    bundle.thresholds.t_conf_raw = r.t_conf_raw;
    bundle.thresholds.t_esc = r.t_esc;
    rnn::save_bundle(a.out, bundle);
  }
}

// ---- imis

struct ImisArgs {
  std::string stream, trace, log_out;
  std::optional<std::size_t> ingress_cap, pool_cap, buffer_cap, result_cap, batch;
  std::optional<std::string> ingress_policy, pool_policy;
  std::optional<std::uint64_t> parse_us, pool_us, buffer_us, infer_base_us, infer_per_flow_us;
  std::string latency_table;
  int classes = 2;
  std::uint32_t clf_seed = 0;
};

void cmd_imis(const Globals& g, const ImisArgs& a) {
  std::vector<imis::EscalatedPacket> stream;
  if (!a.stream.empty())
    stream = imis::load_stream(a.stream);
  else if (!a.trace.empty())
    stream = oracles::stream_from_trace(harness::load_trace(a.trace));
  else
    throw std::invalid_argument("imis needs --stream or --trace");

  auto sc = g.cfg.imis;
  if (a.ingress_cap) sc.ingress_capacity = *a.ingress_cap;
  if (a.pool_cap) sc.pool_capacity = *a.pool_cap;
  if (a.buffer_cap) sc.buffer_capacity = *a.buffer_cap;
  if (a.result_cap) sc.result_capacity = *a.result_cap;
  if (a.batch) sc.batch_size = *a.batch;
  if (a.ingress_policy) {
    const auto p = imis::parse_overflow_policy(*a.ingress_policy);
    if (!p) throw std::invalid_argument("ingress policy must be block or drop");
    sc.ingress_policy = *p;
  }
  if (a.pool_policy) {
    const auto p = imis::parse_pool_policy(*a.pool_policy);
    if (!p) throw std::invalid_argument("pool policy must be oldest or freshest");
    sc.pool_policy = *p;
  }
  if (a.parse_us) sc.parse_us = *a.parse_us;
  if (a.pool_us) sc.pool_us = *a.pool_us;
  if (a.buffer_us) sc.buffer_us = *a.buffer_us;
  if (a.infer_base_us) sc.infer_base_us = *a.infer_base_us;
  if (a.infer_per_flow_us) sc.infer_per_flow_us = *a.infer_per_flow_us;
  if (!a.latency_table.empty()) {
    sc.latency_by_batch.clear();
    for (int v : parse_int_list(a.latency_table)) {
      if (v < 0) throw std::invalid_argument("negative batch latency");
      sc.latency_by_batch.push_back(static_cast<std::uint64_t>(v));
    }
  }

  const auto res = imis::run_pipeline(stream, imis::hash_classifier(a.classes, a.clf_seed), sc);
  const auto& st = res.stats;
  std::cout << "ingested " << st.ingested << "\ndropped " << st.dropped << "\nreleased " << res.log.size()
            << "\nflows " << st.flows << "\nbatches " << st.batches << "\nmax_batches_per_flow "
            << st.max_batches_per_flow << "\nend_time_us " << st.end_time << '\n';
  if (!res.log.empty()) {
    bool any_full = false;
    for (const auto& r : res.log) any_full = any_full || r.full_pipeline;
    if (any_full) imis::write_latency_report(std::cout, imis::latency_report(res.log));
  }
  if (!a.log_out.empty()) {
    auto os = open_out(a.log_out);
    imis::write_release_log(os, res.log);
  }
}

// ---- estimate

struct EstimateArgs {
  std::string bundle;
  HyperFlags hyper;
  std::optional<std::uint32_t> slots;
};

void cmd_estimate(const Globals& g, const EstimateArgs& a) {
  const auto slots = a.slots.value_or(g.cfg.flow.n_slots);
  if (!a.bundle.empty())
    harness::write_resources(std::cout, harness::estimate_resources(rnn::load_bundle(a.bundle)), slots);
  else
    harness::write_resources(std::cout, harness::estimate_resources(a.hyper.apply(g.cfg.hyper)), slots);
}

// ---- verify

struct VerifyArgs {
  std::string bundle;
  HyperFlags hyper;
  oracles::VerifyOptions opts;
};

void cmd_verify(const Globals& g, const VerifyArgs& a) {
  const auto bundle =
      a.bundle.empty() ? oracles::demo_bundle(a.hyper.apply(g.cfg.hyper), a.opts.seed) : rnn::load_bundle(a.bundle);
  const auto checks = oracles::run_verify(bundle, a.opts);
  oracles::write_checks(std::cout, checks);
  std::size_t failed = 0;
  for (const auto& c : checks) failed += c.passed ? 0 : 1;
  if (failed > 0) throw ValidationFailure(std::to_string(failed) + " check(s) failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-rate binary RNN traffic analysis emulator"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("-c,--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);

  GenArgmaxArgs ga;
  auto* gen = app.add_subcommand("gen-argmax", "Generate ternary argmax tables");
  gen->add_option("-n,--n", ga.n, "Number of values")->required()->check(CLI::Range(1, 16));
  gen->add_option("-m,--m", ga.m, "Bits per value")->required()->check(CLI::Range(1, 32));
  gen->add_option("--level", ga.level, "base | opt1 | opt2 | opt1+opt2")->capture_default_str();
  gen->add_option("--tie-order", ga.tie_order, "Comma-separated class priority");
  gen->add_option("--fan", ga.fan, "Split into stages of at most this many operands");
  gen->add_flag("--count-only", ga.count_only, "Print the entry count only");
  gen->add_option("-o,--out", ga.out, "Output file (default stdout)");

  CompileArgs ca;
  auto* compile = app.add_subcommand("compile", "Compile weights into a table bundle");
  compile->add_option("--weights", ca.weights, "Bundle document with full-precision weights")->check(CLI::ExistingFile);
  compile->add_option("--random-seed", ca.random_seed, "Use seeded random weights");
  ca.hyper.add(compile);
  compile->add_option("--tie-order", ca.tie_order, "Comma-separated class priority");
  compile->add_option("--t-conf", ca.t_conf, "Confidence threshold for every class (CPR/wincnt units)");
  compile->add_option("--t-conf-raw", ca.t_conf_raw, "Fixed-point confidence threshold for every class");
  compile->add_option("--t-esc", ca.t_esc, "Ambiguous packets before escalation");
  compile->add_option("--fallback", ca.fallback, "Decision forest JSON")->check(CLI::ExistingFile);
  compile->add_flag("--no-weights", ca.no_weights, "Omit the weights from the output");
  compile->add_option("-o,--out", ca.out, "Output bundle")->required();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic trace");
  synth->add_option("--classes", sa.classes);
  synth->add_option("--flows", sa.flows);
  synth->add_option("--rate", sa.rate, "New flows per second");
  synth->add_option("--separation", sa.separation, "Class spread in (0, 1]");
  synth->add_option("--seed", sa.seed);
  synth->add_option("--min-packets", sa.min_packets);
  synth->add_option("--max-packets", sa.max_packets);
  synth->add_option("-o,--out", sa.out, "Output trace (.bin for binary)")->required();

  SplitArgs spa;
  auto* split = app.add_subcommand("split-flows", "Split raw packets into flow records");
  split->add_option("-i,--in", spa.in)->required()->check(CLI::ExistingFile);
  split->add_option("-o,--out", spa.out)->required();
  split->add_option("--gap-us", spa.gap_us, "Gap that starts a new record");

  ReplayArgs ra;
  auto* replay = app.add_subcommand("replay", "Re-time flows to a target load");
  replay->add_option("-i,--in", ra.in)->required()->check(CLI::ExistingFile);
  replay->add_option("-o,--out", ra.out)->required();
  replay->add_option("--load", ra.load, "New flows per second, or inf");
  replay->add_option("--duration-s", ra.duration_s, "Loop the trace for this long");
  replay->add_option("--start-us", ra.start_us);

  RunArgs rna;
  auto* run = app.add_subcommand("run", "Run the integrated engine over a trace");
  run->add_option("-b,--bundle", rna.bundle)->required()->check(CLI::ExistingFile);
  run->add_option("-t,--trace", rna.trace)->required()->check(CLI::ExistingFile);
  run->add_option("--load", rna.load, "Replay at this load first");
  rna.flow.add(run);
  run->add_option("--escalated-out", rna.escalated_out, "Escalated-packet stream file");
  run->add_option("--decisions-out", rna.decisions_out, "Per-packet decisions CSV");
  run->add_option("--records-out", rna.records_out, "Confidence records (labeled traces)");
  run->add_option("--metrics-out", rna.metrics_out, "Also write the metrics report here");

  CalibrateArgs cla;
  auto* cal = app.add_subcommand("calibrate", "Choose T_conf and T_esc for a target escalation rate");
  cal->add_option("-b,--bundle", cla.bundle)->required()->check(CLI::ExistingFile);
  cal->add_option("-t,--trace", cla.trace, "Labeled trace")->check(CLI::ExistingFile);
  cal->add_option("--records", cla.records, "Confidence records instead of a trace")->check(CLI::ExistingFile);
  cal->add_option("--target", cla.target, "Maximum escalated-flow fraction");
  cal->add_option("--budget", cla.budget, "Correct-decision loss budget per class");
  cal->add_option("--max-t-esc", cla.max_t_esc);
  cla.flow.add(cal);
  cal->add_option("--records-out", cla.records_out);
  cal->add_option("-o,--out", cla.out, "Bundle with the calibrated thresholds");

  ImisArgs ia;
  auto* im = app.add_subcommand("imis", "Simulate the off-switch inference pipeline");
  im->add_option("--stream", ia.stream, "Escalated-packet stream")->check(CLI::ExistingFile);
  im->add_option("--trace", ia.trace, "Treat every packet of a trace as escalated")->check(CLI::ExistingFile);
  im->add_option("--ingress-capacity", ia.ingress_cap);
  im->add_option("--pool-capacity", ia.pool_cap);
  im->add_option("--buffer-capacity", ia.buffer_cap);
  im->add_option("--result-capacity", ia.result_cap);
  im->add_option("--ingress-policy", ia.ingress_policy, "block | drop");
  im->add_option("--pool-policy", ia.pool_policy, "oldest | freshest");
  im->add_option("--batch", ia.batch, "Flows per analyzer batch");
  im->add_option("--parse-us", ia.parse_us);
  im->add_option("--pool-us", ia.pool_us);
  im->add_option("--buffer-us", ia.buffer_us);
  im->add_option("--infer-base-us", ia.infer_base_us);
  im->add_option("--infer-per-flow-us", ia.infer_per_flow_us);
  im->add_option("--latency-table", ia.latency_table, "Comma-separated latency per batch size");
  im->add_option("--classes", ia.classes, "Classes of the stub classifier")->capture_default_str();
  im->add_option("--classifier-seed", ia.clf_seed);
  im->add_option("--log-out", ia.log_out, "Release log CSV");

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "Report table and per-flow state sizes");
  est->add_option("-b,--bundle", ea.bundle)->check(CLI::ExistingFile);
  ea.hyper.add(est);
  est->add_option("--slots", ea.slots, "Flow table slots");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Check tables and engines against the reference oracles");
  ver->add_option("-b,--bundle", va.bundle, "Bundle to check (default: seeded demo bundle)")->check(CLI::ExistingFile);
  va.hyper.add(ver);
  ver->add_option("--seed", va.opts.seed)->capture_default_str();
  ver->add_option("--samples", va.opts.samples)->capture_default_str();
  ver->add_option("--flows", va.opts.trace_flows)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (!g.config_path.empty()) g.cfg = harness::load_config(g.config_path);
    if (*gen) cmd_gen_argmax(ga);
    else if (*compile) cmd_compile(g, ca);
    else if (*synth) cmd_synth(g, sa);
    else if (*split) cmd_split(g, spa);
    else if (*replay) cmd_replay(g, ra);
    else if (*run) cmd_run(g, rna);
    else if (*cal) cmd_calibrate(g, cla);
    else if (*im) cmd_imis(g, ia);
    else if (*est) cmd_estimate(g, ea);
    else if (*ver) cmd_verify(g, va);
  } catch (const ValidationFailure& e) {
    std::cerr << "wirenn: " << e.what() << '\n';
    return kValidation;
  } catch (const FormatError& e) {
    std::cerr << "wirenn: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "wirenn: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "wirenn: error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

#include "wirenn/harness/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "../rnn/json_codec.hpp"
#include "wirenn/error.hpp"

namespace wirenn::harness {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw FormatError("config: " + what); }

void check_keys(const json& j, const char* section, std::initializer_list<const char*> known) {
  if (!j.is_object()) bad(std::string("section '") + section + "' must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) bad(std::string("unknown key '") + item.key() + "' in section '" + section + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  check_keys(doc, "<root>", {"hyperparameters", "flow", "engine", "replay", "calibrate", "imis", "synth", "split"});
  try {
    if (doc.contains("hyperparameters")) c.hyper = rnn::detail::hyper_from_json(doc.at("hyperparameters"));
    if (doc.contains("flow")) {
      const auto& j = doc.at("flow");
      check_keys(j, "flow", {"n_slots", "timeout_us", "index_seed", "id_seed"});
      read(j, "n_slots", c.flow.n_slots);
      read(j, "timeout_us", c.flow.timeout_us);
      read(j, "index_seed", c.flow.index_seed);
      read(j, "id_seed", c.flow.id_seed);
    }
    if (doc.contains("engine")) {
      const auto& j = doc.at("engine");
      check_keys(j, "engine", {"cross_check_argmax"});
      read(j, "cross_check_argmax", c.cross_check_argmax);
    }
    if (doc.contains("replay")) {
      const auto& j = doc.at("replay");
      check_keys(j, "replay", {"load", "duration_s", "start_us"});
      read(j, "load", c.replay.load);
      read(j, "duration_s", c.replay.duration_s);
      read(j, "start_us", c.replay.start_us);
    }
    if (doc.contains("calibrate")) {
      const auto& j = doc.at("calibrate");
      check_keys(j, "calibrate", {"target", "correct_loss_budget", "max_t_esc"});
      read(j, "target", c.calibrate_target);
      read(j, "correct_loss_budget", c.calibration.correct_loss_budget);
      read(j, "max_t_esc", c.calibration.max_t_esc);
    }
    if (doc.contains("imis")) {
      const auto& j = doc.at("imis");
      check_keys(j, "imis",
                 {"ingress_capacity", "pool_capacity", "buffer_capacity", "result_capacity", "ingress_policy",
                  "pool_policy", "batch_size", "parse_us", "pool_us", "buffer_us", "infer_base_us", "infer_per_flow_us",
                  "latency_by_batch"});
      auto& s = c.imis;
      read(j, "ingress_capacity", s.ingress_capacity);
      read(j, "pool_capacity", s.pool_capacity);
      read(j, "buffer_capacity", s.buffer_capacity);
      read(j, "result_capacity", s.result_capacity);
      read(j, "batch_size", s.batch_size);
      read(j, "parse_us", s.parse_us);
      read(j, "pool_us", s.pool_us);
      read(j, "buffer_us", s.buffer_us);
      read(j, "infer_base_us", s.infer_base_us);
      read(j, "infer_per_flow_us", s.infer_per_flow_us);
      read(j, "latency_by_batch", s.latency_by_batch);
      if (j.contains("ingress_policy")) {
        const auto p = imis::parse_overflow_policy(j.at("ingress_policy").get<std::string>());
        if (!p) bad("ingress_policy must be \"block\" or \"drop\"");
        s.ingress_policy = *p;
      }
      if (j.contains("pool_policy")) {
        const auto p = imis::parse_pool_policy(j.at("pool_policy").get<std::string>());
        if (!p) bad("pool_policy must be \"oldest\" or \"freshest\"");
        s.pool_policy = *p;
      }
    }
    if (doc.contains("synth")) {
      const auto& j = doc.at("synth");
      check_keys(j, "synth", {"classes", "flows", "flow_rate", "separation", "seed"});
      read(j, "classes", c.synth.classes);
      read(j, "flows", c.synth.flows);
      read(j, "flow_rate", c.synth.flow_rate);
      read(j, "separation", c.synth.separation);
      read(j, "seed", c.synth.seed);
    }
    if (doc.contains("split")) {
      const auto& j = doc.at("split");
      check_keys(j, "split", {"gap_us"});
      read(j, "gap_us", c.split_gap_us);
    }
  } catch (const json::exception& e) {
    bad(e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  json doc;
  doc["hyperparameters"] = rnn::detail::hyper_to_json(c.hyper);
  doc["flow"] = {{"n_slots", c.flow.n_slots},
                 {"timeout_us", c.flow.timeout_us},
                 {"index_seed", c.flow.index_seed},
                 {"id_seed", c.flow.id_seed}};
  doc["engine"] = {{"cross_check_argmax", c.cross_check_argmax}};
  doc["replay"] = {{"load", c.replay.load}, {"duration_s", c.replay.duration_s}, {"start_us", c.replay.start_us}};
  doc["calibrate"] = {{"target", c.calibrate_target},
                      {"correct_loss_budget", c.calibration.correct_loss_budget},
                      {"max_t_esc", c.calibration.max_t_esc}};
  const auto& s = c.imis;
  doc["imis"] = {{"ingress_capacity", s.ingress_capacity},
                 {"pool_capacity", s.pool_capacity},
                 {"buffer_capacity", s.buffer_capacity},
                 {"result_capacity", s.result_capacity},
                 {"ingress_policy", std::string(imis::to_string(s.ingress_policy))},
                 {"pool_policy", std::string(imis::to_string(s.pool_policy))},
                 {"batch_size", s.batch_size},
                 {"parse_us", s.parse_us},
                 {"pool_us", s.pool_us},
                 {"buffer_us", s.buffer_us},
                 {"infer_base_us", s.infer_base_us},
                 {"infer_per_flow_us", s.infer_per_flow_us},
                 {"latency_by_batch", s.latency_by_batch}};
  doc["synth"] = {{"classes", c.synth.classes},
                  {"flows", c.synth.flows},
                  {"flow_rate", c.synth.flow_rate},
                  {"separation", c.synth.separation},
                  {"seed", c.synth.seed}};
  doc["split"] = {{"gap_us", c.split_gap_us}};
  return doc.dump(2) + "\n";
}

}  // namespace wirenn::harness

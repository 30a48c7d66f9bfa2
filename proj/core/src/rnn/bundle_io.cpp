#include "wirenn/rnn/bundle_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json_codec.hpp"
#include "wirenn/error.hpp"

namespace wirenn::rnn {

namespace detail {

namespace {

constexpr const char* kFormat = "wirenn-bundle";
constexpr int kVersion = 1;

[[noreturn]] void bad(const std::string& what) { throw FormatError("bundle: " + what); }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("field '") + key + "': " + e.what());
  }
}

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

json matrix_to_json(const Matrix& m) { return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}}; }

Matrix matrix_from_json(const json& j) {
  Matrix m;
  m.rows = need(j, "rows").get<int>();
  m.cols = need(j, "cols").get<int>();
  m.data = need(j, "data").get<std::vector<double>>();
  if (m.rows < 0 || m.cols < 0 ||
      m.data.size() != static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols))
    bad("matrix data length does not match rows*cols");
  return m;
}

char hex_digit(unsigned v) { return "0123456789abcdef"[v & 0xF]; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

json table_to_json(const LookupTable& t) {
  const int digits = std::max(1, (t.output_width() + 3) / 4);
  std::string hex(t.size() * static_cast<std::size_t>(digits), '0');
  std::size_t pos = 0;
  for (std::uint64_t v : t.values())
    for (int d = digits - 1; d >= 0; --d) hex[pos++] = hex_digit(static_cast<unsigned>(v >> (4 * d)));
  return {{"input_width", t.input_width()}, {"output_width", t.output_width()}, {"values", std::move(hex)}};
}

LookupTable table_from_json(const json& j, const std::string& role) {
  const int in = need(j, "input_width").get<int>();
  const int out = need(j, "output_width").get<int>();
  const auto& hex = need(j, "values").get_ref<const std::string&>();
  if (in < 0 || in > 30 || out < 1 || out > 64) bad("table '" + role + "' has unsupported widths");
  const std::size_t n = std::size_t{1} << in;
  const int digits = std::max(1, (out + 3) / 4);
  if (hex.size() != n * static_cast<std::size_t>(digits))
    bad("table '" + role + "' has " + std::to_string(hex.size()) + " hex digits, expected " +
        std::to_string(n * static_cast<std::size_t>(digits)));
  std::vector<std::uint64_t> values(n);
  std::size_t pos = 0;
  for (auto& v : values) {
    std::uint64_t x = 0;
    for (int d = 0; d < digits; ++d) {
      const int h = hex_value(hex[pos++]);
      if (h < 0) bad("table '" + role + "' contains a non-hex character");
      x = (x << 4) | static_cast<std::uint64_t>(h);
    }
    v = x;
  }
  try {
    return LookupTable(in, out, std::move(values));
  } catch (const std::invalid_argument& e) {
    bad("table '" + role + "': " + e.what());
  }
}

}  // namespace

json hyper_to_json(const Hyperparams& h) {
  return {{"window", h.window},
          {"n_classes", h.n_classes},
          {"ev_width", h.ev_width},
          {"h_width", h.h_width},
          {"len_input_bits", h.len_input_bits},
          {"ipd_input_bits", h.ipd_input_bits},
          {"ipd_shift", h.ipd_shift},
          {"len_embed_width", h.len_embed_width},
          {"ipd_embed_width", h.ipd_embed_width},
          {"prob_bits", h.prob_bits},
          {"reset_period", h.reset_period},
          {"argmax_fan", h.argmax_fan},
          {"merged", h.merged}};
}

Hyperparams hyper_from_json(const json& j, Hyperparams h) {
  if (!j.is_object()) bad("hyperparameters must be an object");
  static const char* const known[] = {"window",          "n_classes",       "ev_width",   "h_width",
                                      "len_input_bits",  "ipd_input_bits",  "ipd_shift",  "len_embed_width",
                                      "ipd_embed_width", "prob_bits",       "reset_period", "argmax_fan",
                                      "merged"};
  for (const auto& item : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return item.key() == k; }) ==
        std::end(known))
      bad("unknown hyperparameter '" + item.key() + "'");
  }
  h.window = get_or(j, "window", h.window);
  h.n_classes = get_or(j, "n_classes", h.n_classes);
  h.ev_width = get_or(j, "ev_width", h.ev_width);
  h.h_width = get_or(j, "h_width", h.h_width);
  h.len_input_bits = get_or(j, "len_input_bits", h.len_input_bits);
  h.ipd_input_bits = get_or(j, "ipd_input_bits", h.ipd_input_bits);
  h.ipd_shift = get_or(j, "ipd_shift", h.ipd_shift);
  h.len_embed_width = get_or(j, "len_embed_width", h.len_embed_width);
  h.ipd_embed_width = get_or(j, "ipd_embed_width", h.ipd_embed_width);
  h.prob_bits = get_or(j, "prob_bits", h.prob_bits);
  h.reset_period = get_or(j, "reset_period", h.reset_period);
  h.argmax_fan = get_or(j, "argmax_fan", h.argmax_fan);
  h.merged = get_or(j, "merged", h.merged);
  return h;
}

json tree_to_json(const tree::TreeModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees()) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
      if (n.leaf)
        nodes.push_back({{"votes", n.votes}});
      else
        nodes.push_back({{"feature", std::string(tree::to_string(n.feature))},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return {{"n_classes", m.n_classes()}, {"max_depth", m.max_depth()}, {"trees", std::move(trees)}};
}

tree::TreeModel tree_from_json(const json& j) {
  try {
    std::vector<tree::DecisionTree> trees;
    for (const auto& tj : need(j, "trees")) {
      tree::DecisionTree t;
      for (const auto& nj : need(tj, "nodes")) {
        tree::TreeNode n;
        if (nj.contains("votes")) {
          n.leaf = true;
          n.votes = nj.at("votes").get<std::vector<double>>();
        } else {
          n.leaf = false;
          const auto name = need(nj, "feature").get<std::string>();
          const auto f = tree::parse_feature(name);
          if (!f) bad("unknown tree feature '" + name + "'");
          n.feature = *f;
          n.threshold = need(nj, "threshold").get<std::int64_t>();
          n.left = need(nj, "left").get<std::int32_t>();
          n.right = need(nj, "right").get<std::int32_t>();
        }
        t.nodes.push_back(std::move(n));
      }
      trees.push_back(std::move(t));
    }
    return tree::TreeModel(need(j, "n_classes").get<int>(), need(j, "max_depth").get<int>(), std::move(trees));
  } catch (const json::exception& e) {
    bad(std::string("fallback tree: ") + e.what());
  } catch (const std::invalid_argument& e) {
    bad(std::string("fallback tree: ") + e.what());
  }
}

json weights_to_json(const ModelWeights& w) {
  auto embed = [](const EmbeddingWeights& e) {
    return json{{"input_bits", e.input_bits}, {"table", matrix_to_json(e.table)}};
  };
  return {{"len_embed", embed(w.len_embed)},
          {"ipd_embed", embed(w.ipd_embed)},
          {"fc", {{"w", matrix_to_json(w.fc.w)}, {"b", w.fc.b}}},
          {"gru",
           {{"ev_width", w.gru.ev_width},
            {"h_width", w.gru.h_width},
            {"wz", matrix_to_json(w.gru.wz)},
            {"wr", matrix_to_json(w.gru.wr)},
            {"wh", matrix_to_json(w.gru.wh)},
            {"bz", w.gru.bz},
            {"br", w.gru.br},
            {"bh", w.gru.bh}}},
          {"output", {{"w", matrix_to_json(w.output.w)}, {"b", w.output.b}}}};
}

ModelWeights weights_from_json(const json& j) {
  try {
    auto embed = [](const json& e) {
      return EmbeddingWeights{need(e, "input_bits").get<int>(), matrix_from_json(need(e, "table"))};
    };
    ModelWeights w;
    w.len_embed = embed(need(j, "len_embed"));
    w.ipd_embed = embed(need(j, "ipd_embed"));
    const auto& fc = need(j, "fc");
    w.fc = {matrix_from_json(need(fc, "w")), need(fc, "b").get<std::vector<double>>()};
    const auto& g = need(j, "gru");
    w.gru.ev_width = need(g, "ev_width").get<int>();
    w.gru.h_width = need(g, "h_width").get<int>();
    w.gru.wz = matrix_from_json(need(g, "wz"));
    w.gru.wr = matrix_from_json(need(g, "wr"));
    w.gru.wh = matrix_from_json(need(g, "wh"));
    w.gru.bz = need(g, "bz").get<std::vector<double>>();
    w.gru.br = need(g, "br").get<std::vector<double>>();
    w.gru.bh = need(g, "bh").get<std::vector<double>>();
    const auto& o = need(j, "output");
    w.output = {matrix_from_json(need(o, "w")), need(o, "b").get<std::vector<double>>()};
    validate(w.len_embed);
    validate(w.ipd_embed);
    validate(w.fc);
    validate(w.gru);
    validate(w.output);
    return w;
  } catch (const json::exception& e) {
    bad(std::string("weights: ") + e.what());
  } catch (const std::invalid_argument& e) {
    bad(std::string("weights: ") + e.what());
  }
}

}  // namespace detail

using detail::json;

namespace {

struct Role {
  const char* name;
  LookupTable ModelTables::*member;
};

constexpr Role kRoles[] = {{"len_embed", &ModelTables::len_embed}, {"ipd_embed", &ModelTables::ipd_embed},
                           {"fc", &ModelTables::fc},               {"gru_head", &ModelTables::gru_head},
                           {"gru_body", &ModelTables::gru_body},   {"out_tail", &ModelTables::out_tail}};

}  // namespace

std::string serialize_bundle(const ModelBundle& b, const SaveOptions& opts) {
  json doc;
  doc["format"] = detail::kFormat;
  doc["version"] = detail::kVersion;
  doc["hyperparameters"] = detail::hyper_to_json(b.hyper);
  doc["tie_order"] = b.tie_order;
  doc["thresholds"] = {{"t_conf_raw", b.thresholds.t_conf_raw}, {"t_esc", b.thresholds.t_esc}};
  json tables = json::object();
  for (const auto& r : kRoles) {
    const LookupTable& t = b.tables.*(r.member);
    if (!t.empty()) tables[r.name] = detail::table_to_json(t);
  }
  doc["tables"] = std::move(tables);
  if (opts.include_weights && b.weights) doc["weights"] = detail::weights_to_json(*b.weights);
  if (b.fallback) doc["fallback"] = detail::tree_to_json(*b.fallback);
  return doc.dump(opts.indent) + "\n";
}

ModelBundle parse_bundle(const std::string& text, TableSource source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    detail::bad(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", std::string()) != detail::kFormat)
    detail::bad("missing or wrong \"format\" tag");
  const int version = doc.value("version", 0);
  if (version != detail::kVersion) detail::bad("unsupported version " + std::to_string(version));
  const bool recompile = source == TableSource::recompile;

  ModelBundle b;
  try {
    b.hyper = detail::hyper_from_json(detail::need(doc, "hyperparameters"));
    if (!recompile || doc.contains("tie_order")) b.tie_order = detail::need(doc, "tie_order").get<std::vector<int>>();
    if (!recompile || doc.contains("thresholds")) {
      const auto& th = detail::need(doc, "thresholds");
      b.thresholds.t_conf_raw = detail::need(th, "t_conf_raw").get<std::vector<std::uint32_t>>();
      b.thresholds.t_esc = detail::need(th, "t_esc").get<std::uint32_t>();
    }
  } catch (const json::exception& e) {
    detail::bad(e.what());
  }
  if (!recompile) {
    const auto& tables = detail::need(doc, "tables");
    for (const auto& item : tables.items()) {
      const auto* r = std::find_if(std::begin(kRoles), std::end(kRoles),
                                   [&](const Role& role) { return item.key() == role.name; });
      if (r == std::end(kRoles)) detail::bad("unknown table role '" + item.key() + "'");
      b.tables.*(r->member) = detail::table_from_json(item.value(), item.key());
    }
  }
  if (doc.contains("weights")) b.weights = detail::weights_from_json(doc.at("weights"));
  if (doc.contains("fallback")) b.fallback = detail::tree_from_json(doc.at("fallback"));
  try {
    if (recompile) {
      if (!b.weights) detail::bad("recompiling needs \"weights\"");
      auto fallback = std::move(b.fallback);
      b = compile_bundle(b.hyper, *b.weights, std::move(b.tie_order), std::move(b.thresholds));
      b.fallback = std::move(fallback);
    }
    b.validate();
  } catch (const std::invalid_argument& e) {
    detail::bad(e.what());
  }
  return b;
}

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle, const SaveOptions& opts) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << serialize_bundle(bundle, opts);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

ModelBundle load_bundle(const std::filesystem::path& path, TableSource source) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_bundle(ss.str(), source);
}

std::string serialize_hyperparams(const Hyperparams& h) { return detail::hyper_to_json(h).dump(1) + "\n"; }

Hyperparams parse_hyperparams(const std::string& json_text) {
  try {
    return detail::hyper_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    detail::bad(e.what());
  }
}

std::string serialize_tree(const tree::TreeModel& model) { return detail::tree_to_json(model).dump(1) + "\n"; }

tree::TreeModel parse_tree(const std::string& json_text) {
  try {
    return detail::tree_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    detail::bad(e.what());
  }
}

}  // namespace wirenn::rnn

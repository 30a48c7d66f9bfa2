#include "wirenn/rnn/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wirenn/argmax/ternary.hpp"

namespace wirenn::rnn {

int Hyperparams::cpr_width() const noexcept {
  // ceil(log2(2^prob_bits * K)) = prob_bits + ceil(log2 K)
  int k_bits = 0;
  while ((1LL << k_bits) < reset_period) ++k_bits;
  return prob_bits + k_bits;
}

void Hyperparams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("hyperparameters: " + what); };
  if (window < 2 || window > kMaxWindow) fail("window S must be in [2, " + std::to_string(kMaxWindow) + "]");
  if (n_classes < 2 || n_classes > kMaxClasses) fail("n_classes must be in [2, " + std::to_string(kMaxClasses) + "]");
  if (ev_width < 1 || ev_width > kEvCellBits) fail("ev_width must be in [1, 8]");
  if (h_width < 1 || h_width > 32) fail("h_width must be in [1, 32]");
  if (len_input_bits < 1 || len_input_bits > 16) fail("len_input_bits must be in [1, 16]");
  if (ipd_input_bits < 1 || ipd_input_bits > 16) fail("ipd_input_bits must be in [1, 16]");
  if (ipd_shift < 0 || ipd_shift > 40) fail("ipd_shift must be in [0, 40]");
  if (len_embed_width < 1 || ipd_embed_width < 1 || fc_input_width() > 32) fail("bad embedding widths");
  if (prob_bits < 1 || prob_bits > 8) fail("prob_bits must be in [1, 8]");
  if (output_width() > 64) fail("n_classes * prob_bits must be <= 64");
  if (reset_period < 1) fail("reset_period K must be >= 1");
  if (cpr_width() > argmax::kMaxBits) fail("CPR width exceeds 32 bits");
  if (argmax_fan < 2) fail("argmax_fan must be >= 2");
}

void ModelBundle::validate() const {
  hyper.validate();
  argmax::validate_tie_order(tie_order, hyper.n_classes);
  if (thresholds.t_conf_raw.size() != static_cast<std::size_t>(hyper.n_classes))
    throw std::invalid_argument("bundle: t_conf must have one entry per class");
  const auto& h = hyper;
  auto expect = [](const LookupTable& t, int in, int out, const char* name) {
    if (t.input_width() != in || t.output_width() != out)
      throw std::invalid_argument(std::string("bundle: table '") + name + "' has wrong shape");
  };
  expect(tables.len_embed, h.len_input_bits, h.len_embed_width, "len_embed");
  expect(tables.ipd_embed, h.ipd_input_bits, h.ipd_embed_width, "ipd_embed");
  expect(tables.fc, h.fc_input_width(), h.ev_width, "fc");
  if (h.merged) {
    if (h.window == 2) {
      expect(tables.out_tail, 2 * h.ev_width, h.output_width(), "out_tail");
    } else {
      expect(tables.gru_head, 2 * h.ev_width, h.h_width, "gru_head");
      if (h.window > 3) expect(tables.gru_body, h.ev_width + h.h_width, h.h_width, "gru_body");
      expect(tables.out_tail, h.ev_width + h.h_width, h.output_width(), "out_tail");
    }
  } else {
    expect(tables.gru_head, h.ev_width, h.h_width, "gru_head");
    expect(tables.gru_body, h.ev_width + h.h_width, h.h_width, "gru_body");
    expect(tables.out_tail, h.h_width, h.output_width(), "out_tail");
  }
  if (fallback && fallback->n_classes() != h.n_classes)
    throw std::invalid_argument("bundle: fallback tree class count mismatch");
}

tree::TreeModel ModelBundle::fallback_or_default() const {
  if (fallback) return *fallback;
  return tree::TreeModel::constant(hyper.n_classes, tie_order.empty() ? 0 : tie_order.front());
}

ModelBundle compile_bundle(const Hyperparams& hyper, const ModelWeights& weights, std::vector<int> tie_order,
                           Thresholds thresholds, const CompileOptions& opts) {
  hyper.validate();
  const auto& w = weights;
  if (w.len_embed.input_bits != hyper.len_input_bits || w.len_embed.out_width() != hyper.len_embed_width ||
      w.ipd_embed.input_bits != hyper.ipd_input_bits || w.ipd_embed.out_width() != hyper.ipd_embed_width ||
      w.fc.in_width() != hyper.fc_input_width() || w.fc.out_width() != hyper.ev_width ||
      w.gru.ev_width != hyper.ev_width || w.gru.h_width != hyper.h_width ||
      w.output.n_classes() != hyper.n_classes || w.output.h_width() != hyper.h_width)
    throw std::invalid_argument("compile_bundle: weights do not match hyperparameters");

  ModelBundle b;
  b.hyper = hyper;
  b.tie_order = tie_order.empty() ? argmax::default_tie_order(hyper.n_classes) : std::move(tie_order);
  if (thresholds.t_conf_raw.empty()) thresholds.t_conf_raw.assign(static_cast<std::size_t>(hyper.n_classes), 0);
  b.thresholds = std::move(thresholds);

  auto& t = b.tables;
  t.len_embed = compile_layer(w.len_embed, hyper.len_input_bits, hyper.len_embed_width, hyper.prob_bits, opts);
  t.ipd_embed = compile_layer(w.ipd_embed, hyper.ipd_input_bits, hyper.ipd_embed_width, hyper.prob_bits, opts);
  t.fc = compile_layer(w.fc, hyper.fc_input_width(), hyper.ev_width, hyper.prob_bits, opts);
  const int gru_in = hyper.ev_width + hyper.h_width;
  if (hyper.merged) {
    if (hyper.window == 2) {
      t.out_tail = compile_output_pair(w.gru, w.output, hyper.prob_bits, opts);
    } else {
      t.gru_head = compile_gru_pair(w.gru, opts);
      if (hyper.window > 3) t.gru_body = compile_layer(w.gru, gru_in, hyper.h_width, hyper.prob_bits, opts);
      t.out_tail = compile_output_last(w.gru, w.output, hyper.prob_bits, opts);
    }
  } else {
    t.gru_head = compile_gru_first(w.gru, opts);
    t.gru_body = compile_layer(w.gru, gru_in, hyper.h_width, hyper.prob_bits, opts);
    t.out_tail = compile_layer(w.output, hyper.h_width, hyper.output_width(), hyper.prob_bits, opts);
  }
  b.weights = weights;
  b.validate();
  return b;
}

ModelWeights random_weights(const Hyperparams& hyper, std::uint64_t seed) {
  hyper.validate();
  WeightRng rng(seed);
  ModelWeights w;
  w.len_embed = random_embedding(rng, hyper.len_input_bits, hyper.len_embed_width);
  w.ipd_embed = random_embedding(rng, hyper.ipd_input_bits, hyper.ipd_embed_width);
  w.fc = random_dense(rng, hyper.fc_input_width(), hyper.ev_width);
  w.gru = random_gru(rng, hyper.ev_width, hyper.h_width);
  w.output = random_output(rng, hyper.h_width, hyper.n_classes);
  return w;
}

ModelWeights zero_weights(const Hyperparams& hyper) {
  hyper.validate();
  ModelWeights w;
  w.len_embed = {hyper.len_input_bits, Matrix::zeros(1 << hyper.len_input_bits, hyper.len_embed_width)};
  w.ipd_embed = {hyper.ipd_input_bits, Matrix::zeros(1 << hyper.ipd_input_bits, hyper.ipd_embed_width)};
  w.fc = {Matrix::zeros(hyper.ev_width, hyper.fc_input_width()), std::vector<double>(static_cast<std::size_t>(hyper.ev_width), 0.0)};
  const int in = hyper.ev_width + hyper.h_width;
  const auto hz = std::vector<double>(static_cast<std::size_t>(hyper.h_width), 0.0);
  w.gru = {hyper.ev_width, hyper.h_width, Matrix::zeros(hyper.h_width, in), Matrix::zeros(hyper.h_width, in),
           Matrix::zeros(hyper.h_width, in), hz, hz, hz};
  w.output = {Matrix::zeros(hyper.n_classes, hyper.h_width), std::vector<double>(static_cast<std::size_t>(hyper.n_classes), 0.0)};
  return w;
}

std::uint64_t length_key(const Hyperparams& hyper, std::uint32_t length) noexcept {
  return std::min<std::uint64_t>(length, width_mask(hyper.len_input_bits));
}

std::uint64_t ipd_key(const Hyperparams& hyper, std::uint64_t ipd_us) noexcept {
  return std::min<std::uint64_t>(ipd_us >> hyper.ipd_shift, width_mask(hyper.ipd_input_bits));
}

BitVec embed_packet(const ModelBundle& bundle, std::uint32_t length, std::uint64_t ipd_us) {
  const auto& h = bundle.hyper;
  const std::uint64_t len_bits = bundle.tables.len_embed.at(length_key(h, length));
  const std::uint64_t ipd_bits = bundle.tables.ipd_embed.at(ipd_key(h, ipd_us));
  return BitVec(h.ev_width, bundle.tables.fc.at(len_bits | (ipd_bits << h.len_embed_width)));
}

IntermediateResult forward_window_bits(const ModelBundle& bundle, std::span<const std::uint64_t> evs) {
  const auto& hp = bundle.hyper;
  const int S = hp.window;
  const int E = hp.ev_width;
  if (static_cast<int>(evs.size()) != S)
    throw std::invalid_argument("forward_window: expected " + std::to_string(S) + " embedding vectors");
  const std::uint64_t ev_mask = width_mask(E);
  for (auto ev : evs)
    if (ev & ~ev_mask) throw std::invalid_argument("forward_window: embedding vector wider than ev_width");

  const auto& t = bundle.tables;
  std::uint64_t out = 0;
  if (hp.merged) {
    if (S == 2) {
      out = t.out_tail.at(evs[0] | (evs[1] << E));
    } else {
      std::uint64_t h = t.gru_head.at(evs[0] | (evs[1] << E));
      for (int i = 2; i < S - 1; ++i) h = t.gru_body.at(evs[static_cast<std::size_t>(i)] | (h << E));
      out = t.out_tail.at(evs[static_cast<std::size_t>(S - 1)] | (h << E));
    }
  } else {
    std::uint64_t h = t.gru_head.at(evs[0]);
    for (int i = 1; i < S; ++i) h = t.gru_body.at(evs[static_cast<std::size_t>(i)] | (h << E));
    out = t.out_tail.at(h);
  }
  IntermediateResult r;
  r.n_classes = hp.n_classes;
  const std::uint64_t pmask = width_mask(hp.prob_bits);
  for (int c = 0; c < hp.n_classes; ++c)
    r.probs[static_cast<std::size_t>(c)] = static_cast<std::uint32_t>((out >> (c * hp.prob_bits)) & pmask);
  return r;
}

IntermediateResult forward_window(const ModelBundle& bundle, std::span<const BitVec> evs) {
  std::array<std::uint64_t, kMaxWindow> raw{};
  if (evs.size() > raw.size()) throw std::invalid_argument("forward_window: window too long");
  for (std::size_t i = 0; i < evs.size(); ++i) {
    if (evs[i].width() != bundle.hyper.ev_width) throw std::invalid_argument("forward_window: ev width mismatch");
    raw[i] = evs[i].bits();
  }
  return forward_window_bits(bundle, std::span<const std::uint64_t>(raw.data(), evs.size()));
}

std::uint32_t encode_threshold(double t_conf, int prob_bits) {
  if (!(t_conf >= 0.0)) throw std::invalid_argument("threshold must be a non-negative number");
  return static_cast<std::uint32_t>(std::llround(t_conf * static_cast<double>(1 << prob_bits)));
}

double decode_threshold(std::uint32_t raw, int prob_bits) {
  return static_cast<double>(raw) / static_cast<double>(1 << prob_bits);
}

}  // namespace wirenn::rnn

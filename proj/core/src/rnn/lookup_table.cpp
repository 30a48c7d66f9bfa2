#include "wirenn/rnn/lookup_table.hpp"

#include <stdexcept>
#include <string>

#include "wirenn/error.hpp"

namespace wirenn::rnn {

LookupTable::LookupTable(int input_width, int output_width, std::vector<std::uint64_t> values)
    : input_width_(input_width), output_width_(output_width), values_(std::move(values)) {
  if (input_width < 0 || input_width > 40) throw std::invalid_argument("lookup table: bad input width");
  if (output_width < 1 || output_width > 64) throw std::invalid_argument("lookup table: bad output width");
  if (values_.size() != (std::size_t{1} << input_width))
    throw std::invalid_argument("lookup table: expected 2^input_width values");
  const std::uint64_t mask = width_mask(output_width);
  for (auto v : values_)
    if (v & ~mask) throw std::invalid_argument("lookup table: value wider than output width");
}

namespace {

void check_cap(int in_width, const CompileOptions& opts) {
  if (in_width > opts.max_input_bits)
    throw TableTooLarge("lookup table too large for " + std::to_string(in_width) + "-bit key",
                        std::uint64_t{1} << in_width);
}

template <typename F>
LookupTable build(int in_width, int out_width, const CompileOptions& opts, F&& f) {
  check_cap(in_width, opts);
  std::vector<std::uint64_t> values(std::size_t{1} << in_width);
  for (std::uint64_t key = 0; key < values.size(); ++key) values[key] = f(key);
  return LookupTable(in_width, out_width, std::move(values));
}

BitVec low(std::uint64_t key, int width) { return BitVec(width, key & width_mask(width)); }
BitVec high(std::uint64_t key, int shift, int width) { return BitVec(width, (key >> shift) & width_mask(width)); }

}  // namespace

LookupTable compile_layer(const LayerWeights& w, int in_width, int out_width, int prob_bits,
                          const CompileOptions& opts) {
  switch (kind_of(w)) {
    case LayerKind::embedding: {
      const auto& e = std::get<EmbeddingWeights>(w);
      validate(e);
      if (in_width != e.input_bits || out_width != e.out_width())
        throw std::invalid_argument("compile embedding: width mismatch");
      return build(in_width, out_width, opts, [&](std::uint64_t k) { return embed_direct(e, k).bits(); });
    }
    case LayerKind::fully_connected: {
      const auto& d = std::get<DenseWeights>(w);
      validate(d);
      if (in_width != d.in_width() || out_width != d.out_width())
        throw std::invalid_argument("compile fully_connected: width mismatch");
      return build(in_width, out_width, opts,
                   [&](std::uint64_t k) { return fc_direct(d, BitVec(in_width, k)).bits(); });
    }
    case LayerKind::gru: {
      const auto& g = std::get<GruWeights>(w);
      validate(g);
      if (in_width != g.ev_width + g.h_width || out_width != g.h_width)
        throw std::invalid_argument("compile gru: width mismatch");
      return build(in_width, out_width, opts, [&](std::uint64_t k) {
        return gru_step_direct(g, high(k, g.ev_width, g.h_width), low(k, g.ev_width)).bits();
      });
    }
    case LayerKind::output: {
      const auto& o = std::get<OutputWeights>(w);
      validate(o);
      if (in_width != o.h_width() || out_width != o.n_classes() * prob_bits)
        throw std::invalid_argument("compile output: width mismatch");
      return build(in_width, out_width, opts, [&](std::uint64_t k) {
        return pack_probs(quantize_probs(output_probs(o, BitVec(in_width, k)), prob_bits), prob_bits);
      });
    }
  }
  throw std::logic_error("unreachable layer kind");
}

LookupTable compile_gru_pair(const GruWeights& g, const CompileOptions& opts) {
  validate(g);
  return build(2 * g.ev_width, g.h_width, opts, [&](std::uint64_t k) {
    const BitVec h1 = gru_first_step(g, low(k, g.ev_width));
    return gru_step_direct(g, h1, high(k, g.ev_width, g.ev_width)).bits();
  });
}

LookupTable compile_gru_first(const GruWeights& g, const CompileOptions& opts) {
  validate(g);
  return build(g.ev_width, g.h_width, opts, [&](std::uint64_t k) { return gru_first_step(g, low(k, g.ev_width)).bits(); });
}

LookupTable compile_output_last(const GruWeights& g, const OutputWeights& o, int prob_bits,
                                const CompileOptions& opts) {
  validate(g);
  validate(o);
  if (o.h_width() != g.h_width) throw std::invalid_argument("output/gru width mismatch");
  return build(g.ev_width + g.h_width, o.n_classes() * prob_bits, opts, [&](std::uint64_t k) {
    const BitVec h = gru_step_direct(g, high(k, g.ev_width, g.h_width), low(k, g.ev_width));
    return pack_probs(quantize_probs(output_probs(o, h), prob_bits), prob_bits);
  });
}

LookupTable compile_output_pair(const GruWeights& g, const OutputWeights& o, int prob_bits,
                                const CompileOptions& opts) {
  validate(g);
  validate(o);
  if (o.h_width() != g.h_width) throw std::invalid_argument("output/gru width mismatch");
  return build(2 * g.ev_width, o.n_classes() * prob_bits, opts, [&](std::uint64_t k) {
    const BitVec h1 = gru_first_step(g, low(k, g.ev_width));
    const BitVec h2 = gru_step_direct(g, h1, high(k, g.ev_width, g.ev_width));
    return pack_probs(quantize_probs(output_probs(o, h2), prob_bits), prob_bits);
  });
}

}  // namespace wirenn::rnn

#pragma once

// Exact-match tables that replace layer computation: one output bit string
// per possible input bit string.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wirenn/rnn/bitvec.hpp"
#include "wirenn/rnn/layers.hpp"

namespace wirenn::rnn {

inline constexpr int kDefaultMaxInputBits = 22;

class LookupTable {
 public:
  LookupTable() = default;
  LookupTable(int input_width, int output_width, std::vector<std::uint64_t> values);

  int input_width() const noexcept { return input_width_; }
  int output_width() const noexcept { return output_width_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::vector<std::uint64_t>& values() const noexcept { return values_; }

  std::uint64_t at(std::uint64_t key) const noexcept { return values_[key]; }

  friend bool operator==(const LookupTable&, const LookupTable&) = default;

 private:
  int input_width_ = 0;
  int output_width_ = 0;
  std::vector<std::uint64_t> values_;
};

struct CompileOptions {
  int max_input_bits = kDefaultMaxInputBits;
};

// Key layouts (bit i of the key is input component i):
//   embedding        key = raw input value
//   fully_connected  key = x
//   gru              key = ev | h << ev_width
//   output           key = h, value = packed quantized probabilities

/// Single-layer compilation. in_width/out_width must agree with the weights;
/// prob_bits is only used by the output kind. Throws TableTooLarge when
/// in_width exceeds opts.max_input_bits.
LookupTable compile_layer(const LayerWeights& w, int in_width, int out_width, int prob_bits = 4,
                          const CompileOptions& opts = {});

/// GRU_2 o GRU_1 from a zero hidden state: key = ev1 | ev2 << ev_width.
LookupTable compile_gru_pair(const GruWeights& g, const CompileOptions& opts = {});
/// GRU_1 alone from a zero hidden state: key = ev1.
LookupTable compile_gru_first(const GruWeights& g, const CompileOptions& opts = {});
/// Output o GRU_S: key = ev | h << ev_width.
LookupTable compile_output_last(const GruWeights& g, const OutputWeights& o, int prob_bits,
                                const CompileOptions& opts = {});
/// Output o GRU_2 o GRU_1 (the whole window when S = 2): key = ev1 | ev2 << ev_width.
LookupTable compile_output_pair(const GruWeights& g, const OutputWeights& o, int prob_bits,
                                const CompileOptions& opts = {});

}  // namespace wirenn::rnn

#pragma once

// Full-precision layer weights of the binary RNN and the direct (non-table)
// forward computation of each layer. Weights stay real-valued; only the
// activations are binarized.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "wirenn/rnn/bitvec.hpp"

namespace wirenn::rnn {

/// Row-major dense matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  static Matrix zeros(int rows, int cols);
  double operator()(int r, int c) const noexcept {
    return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
  }
  double& operator()(int r, int c) noexcept {
    return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
  }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Learned vector per raw input value (row index = quantized input).
struct EmbeddingWeights {
  int input_bits = 0;
  Matrix table;  // (2^input_bits) x out_width
  int out_width() const noexcept { return table.cols; }
  friend bool operator==(const EmbeddingWeights&, const EmbeddingWeights&) = default;
};

/// y = sign(W x + b) over +-1 inputs.
struct DenseWeights {
  Matrix w;  // out x in
  std::vector<double> b;
  int in_width() const noexcept { return w.cols; }
  int out_width() const noexcept { return w.rows; }
  friend bool operator==(const DenseWeights&, const DenseWeights&) = default;
};

/// GRU gate weights over the concatenated input [ev, h] (ev columns first).
struct GruWeights {
  int ev_width = 0;
  int h_width = 0;
  Matrix wz, wr, wh;  // h_width x (ev_width + h_width)
  std::vector<double> bz, br, bh;
  friend bool operator==(const GruWeights&, const GruWeights&) = default;
};

/// Fully-connected layer with softmax over the final hidden state.
struct OutputWeights {
  Matrix w;  // n_classes x h_width
  std::vector<double> b;
  int n_classes() const noexcept { return w.rows; }
  int h_width() const noexcept { return w.cols; }
  friend bool operator==(const OutputWeights&, const OutputWeights&) = default;
};

enum class LayerKind { embedding, fully_connected, gru, output };
using LayerWeights = std::variant<EmbeddingWeights, DenseWeights, GruWeights, OutputWeights>;

LayerKind kind_of(const LayerWeights& w) noexcept;
std::string_view to_string(LayerKind kind) noexcept;

/// Shape checks; throw std::invalid_argument on inconsistency.
void validate(const EmbeddingWeights& w);
void validate(const DenseWeights& w);
void validate(const GruWeights& w);
void validate(const OutputWeights& w);

BitVec embed_direct(const EmbeddingWeights& w, std::uint64_t input);
BitVec fc_direct(const DenseWeights& w, const BitVec& x);

/// One binarized GRU step from a real-valued hidden state (used for the zero
/// initial state). z, r and the candidate are sign-activated:
///   z = sign(Wz[x,h] + bz), r = sign(Wr[x,h] + br),
///   c = sign(Wh[x, r*h] + bh), h' = sign((1 - z)*h + z*c).
BitVec gru_step_real(const GruWeights& w, std::span<const double> h, std::span<const double> x);
/// GRU step over binarized state and embedding vector.
BitVec gru_step_direct(const GruWeights& w, const BitVec& h, const BitVec& ev);
/// First step of a window: h starts as the all-zero real vector.
BitVec gru_first_step(const GruWeights& w, const BitVec& ev);

/// softmax(W h + b) in full precision.
std::vector<double> output_probs(const OutputWeights& w, const BitVec& h);

/// floor(p * (2^bits - 1) + 0.5), clamped to [0, 2^bits - 1].
std::vector<std::uint32_t> quantize_probs(std::span<const double> p, int bits);

/// Class i occupies bits [i*bits, (i+1)*bits).
std::uint64_t pack_probs(std::span<const std::uint32_t> q, int bits);
std::vector<std::uint32_t> unpack_probs(std::uint64_t packed, int n_classes, int bits);

/// Deterministic weights drawn uniformly from [-scale, scale] using a
/// portable generator (mt19937_64 raw output).
class WeightRng {
 public:
  explicit WeightRng(std::uint64_t seed);
  double uniform(double lo, double hi);
  Matrix matrix(int rows, int cols, double scale);
  std::vector<double> vector(int n, double scale);

 private:
  std::mt19937_64 engine_;
};

EmbeddingWeights random_embedding(WeightRng& rng, int input_bits, int out_width);
DenseWeights random_dense(WeightRng& rng, int in_width, int out_width);
GruWeights random_gru(WeightRng& rng, int ev_width, int h_width);
OutputWeights random_output(WeightRng& rng, int h_width, int n_classes);

}  // namespace wirenn::rnn

#include "wirenn/rnn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wirenn::rnn {

Matrix Matrix::zeros(int rows, int cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix shape");
  return Matrix{rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0)};
}

LayerKind kind_of(const LayerWeights& w) noexcept {
  return static_cast<LayerKind>(w.index());
}

std::string_view to_string(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::embedding: return "embedding";
    case LayerKind::fully_connected: return "fully_connected";
    case LayerKind::gru: return "gru";
    case LayerKind::output: return "output";
  }
  return "?";
}

namespace {

void check_matrix(const Matrix& m, int rows, int cols, const char* what) {
  if (m.rows != rows || m.cols != cols ||
      m.data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument(std::string(what) + ": matrix shape mismatch");
}

void check_bias(const std::vector<double>& b, int n, const char* what) {
  if (b.size() != static_cast<std::size_t>(n)) throw std::invalid_argument(std::string(what) + ": bias length mismatch");
}

double sign(double v) { return v >= 0.0 ? 1.0 : -1.0; }

}  // namespace

void validate(const EmbeddingWeights& w) {
  if (w.input_bits < 1 || w.input_bits > 24) throw std::invalid_argument("embedding: input_bits out of range");
  if (w.out_width() < 1 || w.out_width() > BitVec::kMaxWidth) throw std::invalid_argument("embedding: bad width");
  check_matrix(w.table, 1 << w.input_bits, w.table.cols, "embedding");
}

void validate(const DenseWeights& w) {
  if (w.in_width() < 1 || w.in_width() > BitVec::kMaxWidth || w.out_width() < 1 || w.out_width() > BitVec::kMaxWidth)
    throw std::invalid_argument("fully_connected: bad widths");
  check_matrix(w.w, w.w.rows, w.w.cols, "fully_connected");
  check_bias(w.b, w.out_width(), "fully_connected");
}

void validate(const GruWeights& w) {
  if (w.ev_width < 1 || w.h_width < 1 || w.ev_width + w.h_width > BitVec::kMaxWidth)
    throw std::invalid_argument("gru: bad widths");
  const int in = w.ev_width + w.h_width;
  check_matrix(w.wz, w.h_width, in, "gru.wz");
  check_matrix(w.wr, w.h_width, in, "gru.wr");
  check_matrix(w.wh, w.h_width, in, "gru.wh");
  check_bias(w.bz, w.h_width, "gru.bz");
  check_bias(w.br, w.h_width, "gru.br");
  check_bias(w.bh, w.h_width, "gru.bh");
}

void validate(const OutputWeights& w) {
  if (w.n_classes() < 2 || w.h_width() < 1) throw std::invalid_argument("output: bad shape");
  check_matrix(w.w, w.w.rows, w.w.cols, "output");
  check_bias(w.b, w.n_classes(), "output");
}

BitVec embed_direct(const EmbeddingWeights& w, std::uint64_t input) {
  if (input >= (std::uint64_t{1} << w.input_bits)) throw std::invalid_argument("embedding: input out of range");
  const int r = static_cast<int>(input);
  std::vector<double> row(static_cast<std::size_t>(w.out_width()));
  for (int c = 0; c < w.out_width(); ++c) row[static_cast<std::size_t>(c)] = w.table(r, c);
  return binarize(row);
}

BitVec fc_direct(const DenseWeights& w, const BitVec& x) {
  if (x.width() != w.in_width()) throw std::invalid_argument("fully_connected: input width mismatch");
  std::vector<double> y(static_cast<std::size_t>(w.out_width()));
  for (int r = 0; r < w.out_width(); ++r) {
    double acc = w.b[static_cast<std::size_t>(r)];
    for (int c = 0; c < w.in_width(); ++c) acc += w.w(r, c) * x.sign_at(c);
    y[static_cast<std::size_t>(r)] = acc;
  }
  return binarize(y);
}

BitVec gru_step_real(const GruWeights& w, std::span<const double> h, std::span<const double> x) {
  const int E = w.ev_width;
  const int H = w.h_width;
  if (static_cast<int>(x.size()) != E || static_cast<int>(h.size()) != H)
    throw std::invalid_argument("gru: input width mismatch");

  std::vector<double> z(static_cast<std::size_t>(H)), r(static_cast<std::size_t>(H));
  for (int j = 0; j < H; ++j) {
    double az = w.bz[static_cast<std::size_t>(j)];
    double ar = w.br[static_cast<std::size_t>(j)];
    for (int i = 0; i < E; ++i) {
      az += w.wz(j, i) * x[static_cast<std::size_t>(i)];
      ar += w.wr(j, i) * x[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < H; ++i) {
      az += w.wz(j, E + i) * h[static_cast<std::size_t>(i)];
      ar += w.wr(j, E + i) * h[static_cast<std::size_t>(i)];
    }
    z[static_cast<std::size_t>(j)] = sign(az);
    r[static_cast<std::size_t>(j)] = sign(ar);
  }

  std::vector<double> next(static_cast<std::size_t>(H));
  for (int j = 0; j < H; ++j) {
    double ac = w.bh[static_cast<std::size_t>(j)];
    for (int i = 0; i < E; ++i) ac += w.wh(j, i) * x[static_cast<std::size_t>(i)];
    for (int i = 0; i < H; ++i)
      ac += w.wh(j, E + i) * (r[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)]);
    const double cand = sign(ac);
    const double zj = z[static_cast<std::size_t>(j)];
    next[static_cast<std::size_t>(j)] = (1.0 - zj) * h[static_cast<std::size_t>(j)] + zj * cand;
  }
  return binarize(next);
}

BitVec gru_step_direct(const GruWeights& w, const BitVec& h, const BitVec& ev) {
  if (h.width() != w.h_width || ev.width() != w.ev_width) throw std::invalid_argument("gru: width mismatch");
  const auto hd = h.decode();
  const auto xd = ev.decode();
  return gru_step_real(w, hd, xd);
}

BitVec gru_first_step(const GruWeights& w, const BitVec& ev) {
  if (ev.width() != w.ev_width) throw std::invalid_argument("gru: width mismatch");
  const std::vector<double> zero(static_cast<std::size_t>(w.h_width), 0.0);
  const auto xd = ev.decode();
  return gru_step_real(w, zero, xd);
}

std::vector<double> output_probs(const OutputWeights& w, const BitVec& h) {
  if (h.width() != w.h_width()) throw std::invalid_argument("output: input width mismatch");
  const int N = w.n_classes();
  std::vector<double> logits(static_cast<std::size_t>(N));
  for (int c = 0; c < N; ++c) {
    double acc = w.b[static_cast<std::size_t>(c)];
    for (int i = 0; i < w.h_width(); ++i) acc += w.w(c, i) * h.sign_at(i);
    logits[static_cast<std::size_t>(c)] = acc;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (auto& v : logits) {
    v = std::exp(v - mx);
    total += v;
  }
  for (auto& v : logits) v /= total;
  return logits;
}

std::vector<std::uint32_t> quantize_probs(std::span<const double> p, int bits) {
  if (bits < 1 || bits > 16) throw std::invalid_argument("quantize_probs: bits out of range");
  const double top = static_cast<double>((1U << bits) - 1U);
  std::vector<std::uint32_t> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = std::floor(p[i] * top + 0.5);
    q[i] = static_cast<std::uint32_t>(std::clamp(v, 0.0, top));
  }
  return q;
}

std::uint64_t pack_probs(std::span<const std::uint32_t> q, int bits) {
  if (static_cast<int>(q.size()) * bits > 64) throw std::invalid_argument("pack_probs: does not fit 64 bits");
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < q.size(); ++i) out |= static_cast<std::uint64_t>(q[i]) << (static_cast<int>(i) * bits);
  return out;
}

std::vector<std::uint32_t> unpack_probs(std::uint64_t packed, int n_classes, int bits) {
  std::vector<std::uint32_t> q(static_cast<std::size_t>(n_classes));
  const std::uint64_t mask = width_mask(bits);
  for (int i = 0; i < n_classes; ++i) q[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>((packed >> (i * bits)) & mask);
  return q;
}

WeightRng::WeightRng(std::uint64_t seed) : engine_(seed) {}

double WeightRng::uniform(double lo, double hi) {
  // 53 random mantissa bits; independent of the standard library's distributions.
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Matrix WeightRng::matrix(int rows, int cols, double scale) {
  Matrix m = Matrix::zeros(rows, cols);
  for (auto& v : m.data) v = uniform(-scale, scale);
  return m;
}

std::vector<double> WeightRng::vector(int n, double scale) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = uniform(-scale, scale);
  return v;
}

EmbeddingWeights random_embedding(WeightRng& rng, int input_bits, int out_width) {
  return EmbeddingWeights{input_bits, rng.matrix(1 << input_bits, out_width, 1.0)};
}

DenseWeights random_dense(WeightRng& rng, int in_width, int out_width) {
  return DenseWeights{rng.matrix(out_width, in_width, 1.0), rng.vector(out_width, 0.5)};
}

GruWeights random_gru(WeightRng& rng, int ev_width, int h_width) {
  GruWeights g;
  g.ev_width = ev_width;
  g.h_width = h_width;
  const int in = ev_width + h_width;
  g.wz = rng.matrix(h_width, in, 1.0);
  g.wr = rng.matrix(h_width, in, 1.0);
  g.wh = rng.matrix(h_width, in, 1.0);
  g.bz = rng.vector(h_width, 0.5);
  g.br = rng.vector(h_width, 0.5);
  g.bh = rng.vector(h_width, 0.5);
  return g;
}

OutputWeights random_output(WeightRng& rng, int h_width, int n_classes) {
  return OutputWeights{rng.matrix(n_classes, h_width, 1.5), rng.vector(n_classes, 0.5)};
}

}  // namespace wirenn::rnn

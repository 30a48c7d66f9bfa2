#include "wirenn/oracles/rnn_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wirenn::oracles {

Vec sign_vec(const Vec& x) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] >= 0.0 ? 1.0 : -1.0;
  return out;
}

Vec pm1(std::uint64_t bits, int width) {
  Vec out(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) out[static_cast<std::size_t>(i)] = ((bits >> i) & 1U) ? 1.0 : -1.0;
  return out;
}

std::uint64_t to_bits(const Vec& pm) {
  std::uint64_t b = 0;
  for (std::size_t i = 0; i < pm.size(); ++i)
    if (pm[i] > 0) b |= std::uint64_t{1} << i;
  return b;
}

namespace {

/// bias + W * x, accumulated left to right.
Vec affine(const rnn::Matrix& w, const std::vector<double>& b, const Vec& x) {
  if (static_cast<std::size_t>(w.cols) != x.size()) throw std::invalid_argument("oracle: shape mismatch");
  Vec out(static_cast<std::size_t>(w.rows));
  for (int r = 0; r < w.rows; ++r) {
    double acc = b[static_cast<std::size_t>(r)];
    for (int c = 0; c < w.cols; ++c) acc += w(r, c) * x[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

Vec concat(const Vec& a, const Vec& b) {
  Vec out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

Vec ref_embedding(const rnn::EmbeddingWeights& w, std::uint64_t input) {
  Vec row(static_cast<std::size_t>(w.table.cols));
  for (int c = 0; c < w.table.cols; ++c) row[static_cast<std::size_t>(c)] = w.table(static_cast<int>(input), c);
  return sign_vec(row);
}

Vec ref_dense(const rnn::DenseWeights& w, const Vec& x) { return sign_vec(affine(w.w, w.b, x)); }

Vec ref_gru(const rnn::GruWeights& w, const Vec& h, const Vec& ev) {
  const Vec xh = concat(ev, h);
  const Vec z = sign_vec(affine(w.wz, w.bz, xh));
  const Vec r = sign_vec(affine(w.wr, w.br, xh));
  Vec rh(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) rh[i] = r[i] * h[i];
  const Vec cand = sign_vec(affine(w.wh, w.bh, concat(ev, rh)));
  Vec next(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) next[i] = (1.0 - z[i]) * h[i] + z[i] * cand[i];
  return sign_vec(next);
}

std::vector<std::uint32_t> ref_output(const rnn::OutputWeights& w, const Vec& h, int prob_bits) {
  Vec logits = affine(w.w, w.b, h);
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0;
  for (auto& l : logits) {
    l = std::exp(l - mx);
    total += l;
  }
  const double top = static_cast<double>((1u << prob_bits) - 1);
  std::vector<std::uint32_t> q(logits.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = static_cast<std::uint32_t>(std::clamp(std::floor(logits[i] / total * top + 0.5), 0.0, top));
  return q;
}

Vec ref_embed_packet(const rnn::Hyperparams& hp, const rnn::ModelWeights& w, std::uint32_t length, std::uint64_t ipd_us) {
  const std::uint64_t len_max = (std::uint64_t{1} << hp.len_input_bits) - 1;
  const std::uint64_t ipd_max = (std::uint64_t{1} << hp.ipd_input_bits) - 1;
  const std::uint64_t lk = std::min<std::uint64_t>(length, len_max);
  const std::uint64_t ik = std::min<std::uint64_t>(ipd_us >> hp.ipd_shift, ipd_max);
  return ref_dense(w.fc, concat(ref_embedding(w.len_embed, lk), ref_embedding(w.ipd_embed, ik)));
}

std::vector<std::uint32_t> ref_forward(const rnn::Hyperparams& hp, const rnn::ModelWeights& w,
                                       std::span<const std::uint64_t> evs) {
  Vec h(static_cast<std::size_t>(hp.h_width), 0.0);
  for (auto ev : evs) h = ref_gru(w.gru, h, pm1(ev, hp.ev_width));
  return ref_output(w.output, h, hp.prob_bits);
}

namespace {

template <typename Fn>
CheckResult check_table(const rnn::LookupTable& t, int max_bits, std::uint64_t samples, std::uint64_t seed, Fn&& expect) {
  CheckResult r;
  const std::uint64_t n = t.size();
  auto one = [&](std::uint64_t key) {
    ++r.checked;
    const std::uint64_t want = expect(key);
    if (t.at(key) != want && r.mismatches++ == 0) {
      std::ostringstream os;
      os << "key " << key << ": table " << t.at(key) << ", reference " << want;
      r.first_mismatch = os.str();
    }
  };
  if (t.input_width() <= max_bits) {
    for (std::uint64_t k = 0; k < n; ++k) one(k);
  } else {
    std::mt19937_64 rng(seed);
    for (std::uint64_t s = 0; s < samples; ++s) one(rng() % n);
  }
  return r;
}

}  // namespace

std::vector<TableCheck> check_bundle_tables(const rnn::ModelBundle& b, int max_bits, std::uint64_t samples,
                                            std::uint64_t seed) {
  if (!b.weights) throw std::invalid_argument("bundle has no weights to verify against");
  const auto& w = *b.weights;
  const auto& hp = b.hyper;
  const int E = hp.ev_width, H = hp.h_width, pb = hp.prob_bits;
  const std::uint64_t emask = (std::uint64_t{1} << E) - 1;
  const Vec h0(static_cast<std::size_t>(H), 0.0);
  auto packed = [pb](const std::vector<std::uint32_t>& q) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < q.size(); ++i) v |= std::uint64_t{q[i]} << (static_cast<int>(i) * pb);
    return v;
  };

  std::vector<TableCheck> out;
  out.push_back({"len_embed", check_table(b.tables.len_embed, max_bits, samples, seed, [&](std::uint64_t k) {
                   return to_bits(ref_embedding(w.len_embed, k));
                 })});
  out.push_back({"ipd_embed", check_table(b.tables.ipd_embed, max_bits, samples, seed, [&](std::uint64_t k) {
                   return to_bits(ref_embedding(w.ipd_embed, k));
                 })});
  out.push_back({"fc", check_table(b.tables.fc, max_bits, samples, seed, [&](std::uint64_t k) {
                   return to_bits(ref_dense(w.fc, pm1(k, hp.fc_input_width())));
                 })});
  auto gru_key = [&](std::uint64_t k) { return ref_gru(w.gru, pm1(k >> E, H), pm1(k & emask, E)); };
  if (hp.merged) {
    if (hp.window == 2) {
      out.push_back({"out_tail(output.gru2.gru1)", check_table(b.tables.out_tail, max_bits, samples, seed, [&](std::uint64_t k) {
                       const Vec h1 = ref_gru(w.gru, h0, pm1(k & emask, E));
                       return packed(ref_output(w.output, ref_gru(w.gru, h1, pm1(k >> E, E)), pb));
                     })});
    } else {
      out.push_back({"gru_head(gru2.gru1)", check_table(b.tables.gru_head, max_bits, samples, seed, [&](std::uint64_t k) {
                       const Vec h1 = ref_gru(w.gru, h0, pm1(k & emask, E));
                       return to_bits(ref_gru(w.gru, h1, pm1(k >> E, E)));
                     })});
      if (hp.window > 3)
        out.push_back({"gru_body", check_table(b.tables.gru_body, max_bits, samples, seed,
                                               [&](std::uint64_t k) { return to_bits(gru_key(k)); })});
      out.push_back({"out_tail(output.gru_s)", check_table(b.tables.out_tail, max_bits, samples, seed, [&](std::uint64_t k) {
                       return packed(ref_output(w.output, gru_key(k), pb));
                     })});
    }
  } else {
    out.push_back({"gru_head(gru1)", check_table(b.tables.gru_head, max_bits, samples, seed, [&](std::uint64_t k) {
                     return to_bits(ref_gru(w.gru, h0, pm1(k, E)));
                   })});
    out.push_back({"gru_body", check_table(b.tables.gru_body, max_bits, samples, seed,
                                           [&](std::uint64_t k) { return to_bits(gru_key(k)); })});
    out.push_back({"out_tail(output)", check_table(b.tables.out_tail, max_bits, samples, seed, [&](std::uint64_t k) {
                     return packed(ref_output(w.output, pm1(k, H), pb));
                   })});
  }
  return out;
}

CheckResult check_forward_random(const rnn::ModelBundle& b, std::uint64_t samples, std::uint64_t seed) {
  if (!b.weights) throw std::invalid_argument("bundle has no weights to verify against");
  const auto& hp = b.hyper;
  CheckResult r;
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> evs(static_cast<std::size_t>(hp.window));
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& e : evs) e = rng() & ((std::uint64_t{1} << hp.ev_width) - 1);
    const auto got = rnn::forward_window_bits(b, evs).view();
    const auto want = ref_forward(hp, *b.weights, evs);
    ++r.checked;
    if (!std::equal(got.begin(), got.end(), want.begin(), want.end()) && r.mismatches++ == 0)
      r.first_mismatch = "window sample " + std::to_string(s);
  }
  return r;
}

}  // namespace wirenn::oracles

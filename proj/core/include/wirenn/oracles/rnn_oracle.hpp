#pragma once

// Straightforward re-implementations of the binary RNN layers on +-1 vectors,
// used to check the compiled tables and the library's direct computation.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wirenn/oracles/argmax_oracle.hpp"
#include "wirenn/rnn/bundle.hpp"

namespace wirenn::oracles {

using Vec = std::vector<double>;

/// x >= 0 -> +1, else -1
Vec sign_vec(const Vec& x);
/// Bit i of `bits` -> component i.
Vec pm1(std::uint64_t bits, int width);
std::uint64_t to_bits(const Vec& pm);

Vec ref_embedding(const rnn::EmbeddingWeights& w, std::uint64_t input);
Vec ref_dense(const rnn::DenseWeights& w, const Vec& x);
/// h may be the all-zero real vector for the first step.
Vec ref_gru(const rnn::GruWeights& w, const Vec& h, const Vec& ev);
std::vector<std::uint32_t> ref_output(const rnn::OutputWeights& w, const Vec& h, int prob_bits);

/// Length/IPD -> ev with weights only.
Vec ref_embed_packet(const rnn::Hyperparams& hp, const rnn::ModelWeights& w, std::uint32_t length, std::uint64_t ipd_us);

/// S GRU steps from a zero state, then the output layer, all from weights.
std::vector<std::uint32_t> ref_forward(const rnn::Hyperparams& hp, const rnn::ModelWeights& w,
                                       std::span<const std::uint64_t> evs);

struct TableCheck {
  std::string name;
  CheckResult result;
};

/// Every entry of every table in the bundle against the reference layers;
/// tables wider than `max_exhaustive_bits` are sampled with `samples` keys.
/// Requires bundle.weights.
std::vector<TableCheck> check_bundle_tables(const rnn::ModelBundle& bundle, int max_exhaustive_bits = 22,
                                            std::uint64_t samples = 1u << 16, std::uint64_t seed = 7);

/// forward_window (tables) vs. ref_forward on random windows.
CheckResult check_forward_random(const rnn::ModelBundle& bundle, std::uint64_t samples, std::uint64_t seed);

}  // namespace wirenn::oracles

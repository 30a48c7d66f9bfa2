#pragma once

// Compiled model: hyperparameters, the lookup tables the data plane uses,
// escalation thresholds and, optionally, the full-precision weights they
// were compiled from.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wirenn/rnn/bitvec.hpp"
#include "wirenn/rnn/layers.hpp"
#include "wirenn/rnn/lookup_table.hpp"
#include "wirenn/tree/fallback_tree.hpp"

namespace wirenn::rnn {

inline constexpr int kMaxWindow = 32;
inline constexpr int kMaxClasses = 16;
/// Ring-buffer cell width; ev_width must not exceed it.
inline constexpr int kEvCellBits = 8;

struct Hyperparams {
  int window = 8;  // S
  int n_classes = 6;
  int ev_width = 6;
  int h_width = 9;
  int len_input_bits = 11;
  int ipd_input_bits = 12;
  int ipd_shift = 6;  // IPD key = ipd_us >> ipd_shift, saturated
  int len_embed_width = 10;
  int ipd_embed_width = 8;
  int prob_bits = 4;
  int reset_period = 128;  // K
  int argmax_fan = 3;
  bool merged = true;

  /// ceil(log2(2^prob_bits * K))
  int cpr_width() const noexcept;
  int fc_input_width() const noexcept { return len_embed_width + ipd_embed_width; }
  int output_width() const noexcept { return n_classes * prob_bits; }
  void validate() const;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

struct Thresholds {
  /// Per-class confidence thresholds in CPR/wincnt units, fixed point with
  /// prob_bits fractional bits.
  std::vector<std::uint32_t> t_conf_raw;
  std::uint32_t t_esc = 0xFFFFFFFFu;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct ModelWeights {
  EmbeddingWeights len_embed;
  EmbeddingWeights ipd_embed;
  DenseWeights fc;
  GruWeights gru;
  OutputWeights output;

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

/// Table roles depend on `merged` and S:
///   merged, S = 2:  tail = Output o GRU_2 o GRU_1 (key ev1 | ev2 << E)
///   merged, S >= 3: head = GRU_2 o GRU_1, body = GRU (steps 3..S-1), tail = Output o GRU_S
///   unmerged:       head = GRU_1, body = GRU (steps 2..S), tail = Output (key h)
struct ModelTables {
  LookupTable len_embed;
  LookupTable ipd_embed;
  LookupTable fc;
  LookupTable gru_head;
  LookupTable gru_body;
  LookupTable out_tail;

  friend bool operator==(const ModelTables&, const ModelTables&) = default;
};

/// Quantized per-class probability vector of one window.
struct IntermediateResult {
  int n_classes = 0;
  std::array<std::uint32_t, kMaxClasses> probs{};

  std::span<const std::uint32_t> view() const noexcept { return {probs.data(), static_cast<std::size_t>(n_classes)}; }
  friend bool operator==(const IntermediateResult&, const IntermediateResult&) = default;
};

struct ModelBundle {
  Hyperparams hyper;
  std::vector<int> tie_order;
  Thresholds thresholds;
  ModelTables tables;
  std::optional<ModelWeights> weights;
  std::optional<tree::TreeModel> fallback;

  /// Fallback model, or a constant tree voting tie_order[0].
  tree::TreeModel fallback_or_default() const;
  void validate() const;
};

/// Builds every table from `weights`. Thresholds default to "never ambiguous,
/// never escalate" when left empty.
ModelBundle compile_bundle(const Hyperparams& hyper, const ModelWeights& weights,
                           std::vector<int> tie_order = {}, Thresholds thresholds = {},
                           const CompileOptions& opts = {});

/// Seeded random weights matching `hyper`.
ModelWeights random_weights(const Hyperparams& hyper, std::uint64_t seed);

/// Zero weights: every pre-activation is 0, so every activation is +1.
ModelWeights zero_weights(const Hyperparams& hyper);

/// Raw packet fields to table keys.
std::uint64_t length_key(const Hyperparams& hyper, std::uint32_t length) noexcept;
std::uint64_t ipd_key(const Hyperparams& hyper, std::uint64_t ipd_us) noexcept;

/// Embedding tables + FC table.
BitVec embed_packet(const ModelBundle& bundle, std::uint32_t length, std::uint64_t ipd_us);

/// Table-driven forward pass over one full window (evs[0] is the oldest).
IntermediateResult forward_window(const ModelBundle& bundle, std::span<const BitVec> evs);

/// Same, on raw ev bit patterns.
IntermediateResult forward_window_bits(const ModelBundle& bundle, std::span<const std::uint64_t> evs);

/// Converts a real threshold (confidence units) to the fixed-point encoding;
/// rounds to nearest.
std::uint32_t encode_threshold(double t_conf, int prob_bits);
double decode_threshold(std::uint32_t raw, int prob_bits);

}  // namespace wirenn::rnn

#pragma once

// Argmax split into a tournament of smaller ternary tables, for when a single
// n-way table would not fit one stage's TCAM.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wirenn/argmax/ternary.hpp"

namespace wirenn::argmax {

/// Input of a stage: an original value (by index) or the winner of an earlier stage.
struct Operand {
  enum class Kind { input, stage } kind = Kind::input;
  std::size_t index = 0;
  friend bool operator==(const Operand&, const Operand&) = default;
};

struct ChainStage {
  std::vector<Operand> operands;
  TernaryTable table;
};

class ArgmaxChain {
 public:
  ArgmaxChain() = default;
  ArgmaxChain(int n, int m, std::vector<int> tie_order, std::vector<ChainStage> stages);

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  const std::vector<int>& tie_order() const noexcept { return tie_order_; }
  const std::vector<ChainStage>& stages() const noexcept { return stages_; }
  std::uint64_t total_entries() const noexcept;

  /// Runs every stage in order, carrying (value, original index) pairs.
  std::size_t lookup(std::span<const std::uint32_t> values) const;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<int> tie_order_;
  std::vector<ChainStage> stages_;
};

/// Groups of at most `fan` consecutive entries of the tie order are reduced
/// first, then their winners, until one remains. fan >= n gives one stage.
/// Throws std::invalid_argument for fan < 2.
ArgmaxChain split_argmax(int n, int m, int fan, std::span<const int> tie_order,
                         OptLevel level = OptLevel::opt1_opt2,
                         std::size_t max_entries_per_stage = kDefaultMaxEntries);

inline ArgmaxChain split_argmax(int n, int m, int fan) {
  return split_argmax(n, m, fan, default_tie_order(n));
}

/// Entry total of split_argmax(n, m, fan) without building it.
std::uint64_t chain_entry_count(int n, int m, int fan, OptLevel level = OptLevel::opt1_opt2);

}  // namespace wirenn::argmax

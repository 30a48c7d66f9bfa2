#include "wirenn/argmax/chain.hpp"

#include <stdexcept>
#include <utility>

namespace wirenn::argmax {

ArgmaxChain::ArgmaxChain(int n, int m, std::vector<int> tie_order, std::vector<ChainStage> stages)
    : n_(n), m_(m), tie_order_(std::move(tie_order)), stages_(std::move(stages)) {
  validate_tie_order(tie_order_, n_);
  if (stages_.empty()) throw std::invalid_argument("argmax chain needs at least one stage");
}

std::uint64_t ArgmaxChain::total_entries() const noexcept {
  std::uint64_t total = 0;
  for (const auto& s : stages_) total += s.table.size();
  return total;
}

std::size_t ArgmaxChain::lookup(std::span<const std::uint32_t> values) const {
  if (values.size() != static_cast<std::size_t>(n_))
    throw std::invalid_argument("argmax chain lookup: expected " + std::to_string(n_) + " values");
  struct Carried {
    std::uint32_t value;
    std::size_t index;
  };
  std::vector<Carried> results;
  results.reserve(stages_.size());
  std::uint32_t keys[64];
  std::size_t origin[64];
  for (const auto& stage : stages_) {
    const std::size_t k = stage.operands.size();
    for (std::size_t i = 0; i < k; ++i) {
      const Operand& op = stage.operands[i];
      if (op.kind == Operand::Kind::input) {
        keys[i] = values[op.index];
        origin[i] = op.index;
      } else {
        keys[i] = results[op.index].value;
        origin[i] = results[op.index].index;
      }
    }
    const std::size_t w = stage.table.lookup(std::span<const std::uint32_t>(keys, k));
    results.push_back({keys[w], origin[w]});
  }
  return results.back().index;
}

namespace {

template <typename OnStage>
void plan_tournament(int n, int fan, OnStage&& on_stage) {
  if (fan < 2) throw std::invalid_argument("split_argmax: fan must be >= 2");
  if (n < 1) throw std::invalid_argument("split_argmax: n must be >= 1");
  // Operands of the current round in tie-precedence order.
  std::vector<Operand> round(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) round[static_cast<std::size_t>(i)] = {Operand::Kind::input, static_cast<std::size_t>(i)};
  std::size_t stage_count = 0;
  bool first = true;
  while (round.size() > 1 || first) {
    first = false;
    std::vector<Operand> next;
    for (std::size_t start = 0; start < round.size(); start += static_cast<std::size_t>(fan)) {
      const std::size_t end = std::min(round.size(), start + static_cast<std::size_t>(fan));
      if (end - start == 1 && round.size() > 1) {
        next.push_back(round[start]);
        continue;
      }
      std::vector<Operand> group(round.begin() + static_cast<std::ptrdiff_t>(start),
                                 round.begin() + static_cast<std::ptrdiff_t>(end));
      on_stage(std::move(group));
      next.push_back({Operand::Kind::stage, stage_count++});
    }
    round = std::move(next);
  }
}

}  // namespace

ArgmaxChain split_argmax(int n, int m, int fan, std::span<const int> tie_order, OptLevel level,
                         std::size_t max_entries_per_stage) {
  validate_tie_order(tie_order, n);
  if (fan < 2) throw std::invalid_argument("split_argmax: fan must be >= 2");
  std::vector<ChainStage> stages;
  if (n <= fan) {
    std::vector<Operand> ops(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ops[static_cast<std::size_t>(i)] = {Operand::Kind::input, static_cast<std::size_t>(i)};
    stages.push_back({std::move(ops), generate_table(n, m, tie_order, level, max_entries_per_stage)});
    return ArgmaxChain(n, m, std::vector<int>(tie_order.begin(), tie_order.end()), std::move(stages));
  }
  plan_tournament(n, fan, [&](std::vector<Operand> group) {
    // Operands that are original inputs are mapped through the tie order; the
    // group positions are already in precedence order, so each stage uses the
    // ascending order over its positions.
    for (auto& op : group)
      if (op.kind == Operand::Kind::input) op.index = static_cast<std::size_t>(tie_order[op.index]);
    const int k = static_cast<int>(group.size());
    ChainStage st{std::move(group), generate_table(k, m, default_tie_order(k), level, max_entries_per_stage)};
    stages.push_back(std::move(st));
  });
  return ArgmaxChain(n, m, std::vector<int>(tie_order.begin(), tie_order.end()), std::move(stages));
}

std::uint64_t chain_entry_count(int n, int m, int fan, OptLevel level) {
  std::uint64_t total = 0;
  plan_tournament(n, fan, [&](std::vector<Operand> group) {
    total += count_entries(static_cast<int>(group.size()), m, level);
  });
  return total;
}

}  // namespace wirenn::argmax

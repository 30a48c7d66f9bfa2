#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "wirenn/argmax/chain.hpp"
#include "wirenn/argmax/ternary.hpp"

namespace wirenn::oracles {

/// Max value; among equal maxima the earliest index in tie_order.
int brute_force_argmax(std::span<const std::uint32_t> values, std::span<const int> tie_order);

struct CheckResult {
  std::uint64_t checked = 0;
  std::uint64_t mismatches = 0;
  std::string first_mismatch;
  bool ok() const noexcept { return mismatches == 0 && checked > 0; }
};

/// Every one of the 2^(n*m) inputs (n*m <= 24).
CheckResult check_table_exhaustive(const argmax::TernaryTable& table);

/// Chain vs. brute force on `samples` uniform random tuples.
CheckResult check_chain_random(const argmax::ArgmaxChain& chain, std::uint64_t samples, std::uint64_t seed);

/// Chain vs. a single generated table with the same tie order.
CheckResult check_chain_vs_table(const argmax::ArgmaxChain& chain, const argmax::TernaryTable& table,
                                 std::uint64_t samples, std::uint64_t seed);

/// Count by literal recursion on (n, m), no memoization.
std::uint64_t recurrence_count(int n, int m, argmax::OptLevel level);

}  // namespace wirenn::oracles

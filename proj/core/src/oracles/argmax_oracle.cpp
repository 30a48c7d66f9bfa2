#include "wirenn/oracles/argmax_oracle.hpp"

#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace wirenn::oracles {

int brute_force_argmax(std::span<const std::uint32_t> values, std::span<const int> tie_order) {
  std::uint32_t best = 0;
  for (auto v : values) best = std::max(best, v);
  for (int idx : tie_order)
    if (values[static_cast<std::size_t>(idx)] == best) return idx;
  throw std::logic_error("brute_force_argmax: empty tie order");
}

namespace {

std::string describe(std::span<const std::uint32_t> v, std::size_t got, int expect) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ") -> " << got << ", expected " << expect;
  return os.str();
}

}  // namespace

CheckResult check_table_exhaustive(const argmax::TernaryTable& table) {
  const int n = table.n(), m = table.m();
  if (n * m > 24) throw std::invalid_argument("exhaustive check limited to n*m <= 24");
  CheckResult r;
  std::vector<std::uint32_t> v(static_cast<std::size_t>(n));
  const std::uint64_t total = std::uint64_t{1} << (n * m);
  const std::uint32_t mask = (1u << m) - 1;
  for (std::uint64_t x = 0; x < total; ++x) {
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(x >> (i * m)) & mask;
    const std::size_t got = table.lookup(v);
    const int expect = brute_force_argmax(v, table.tie_order());
    ++r.checked;
    if (got != static_cast<std::size_t>(expect)) {
      if (r.mismatches++ == 0) r.first_mismatch = describe(v, got, expect);
    }
  }
  return r;
}

namespace {

template <typename Fn>
CheckResult random_check(int n, int m, std::uint64_t samples, std::uint64_t seed, Fn&& compare) {
  CheckResult r;
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> v(static_cast<std::size_t>(n));
  const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
  for (std::uint64_t s = 0; s < samples; ++s) {
    // Mix in frequent ties: every fourth sample copies one value over another.
    for (auto& x : v) x = static_cast<std::uint32_t>(rng() & mask);
    if (s % 4 == 0 && n > 1) v[rng() % static_cast<std::uint64_t>(n)] = v[rng() % static_cast<std::uint64_t>(n)];
    ++r.checked;
    std::string msg;
    if (!compare(v, msg) && r.mismatches++ == 0) r.first_mismatch = msg;
  }
  return r;
}

}  // namespace

CheckResult check_chain_random(const argmax::ArgmaxChain& chain, std::uint64_t samples, std::uint64_t seed) {
  return random_check(chain.n(), chain.m(), samples, seed, [&](const std::vector<std::uint32_t>& v, std::string& msg) {
    const std::size_t got = chain.lookup(v);
    const int expect = brute_force_argmax(v, chain.tie_order());
    if (got == static_cast<std::size_t>(expect)) return true;
    msg = describe(v, got, expect);
    return false;
  });
}

CheckResult check_chain_vs_table(const argmax::ArgmaxChain& chain, const argmax::TernaryTable& table,
                                 std::uint64_t samples, std::uint64_t seed) {
  if (chain.n() != table.n() || chain.m() != table.m()) throw std::invalid_argument("chain/table shape mismatch");
  return random_check(chain.n(), chain.m(), samples, seed, [&](const std::vector<std::uint32_t>& v, std::string& msg) {
    const std::size_t got = chain.lookup(v);
    const std::size_t expect = table.lookup(v);
    if (got == expect) return true;
    msg = describe(v, got, static_cast<int>(expect));
    return false;
  });
}

std::uint64_t recurrence_count(int n, int m, argmax::OptLevel level) {
  if (n < 1 || m < 1) throw std::invalid_argument("recurrence_count: n, m >= 1");
  if (n == 1) return 1;
  const bool merge = argmax::has_merge(level);
  const bool reverse = argmax::has_reverse_base(level);
  if (m == 1) return reverse ? static_cast<std::uint64_t>(n) : (std::uint64_t{1} << n);
  std::uint64_t total = (merge ? 1 : 2) * recurrence_count(n, m - 1, level);
  std::uint64_t binom = 1;  // C(n, i)
  for (int i = 1; i < n; ++i) {
    binom = binom * static_cast<std::uint64_t>(n - i + 1) / static_cast<std::uint64_t>(i);
    total += binom * recurrence_count(i, m - 1, level);
  }
  return total;
}

}  // namespace wirenn::oracles

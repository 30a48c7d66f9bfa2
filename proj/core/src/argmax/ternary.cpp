#include "wirenn/argmax/ternary.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "wirenn/error.hpp"

namespace wirenn::argmax {

bool has_merge(OptLevel level) noexcept {
  return level == OptLevel::opt1 || level == OptLevel::opt1_opt2;
}

bool has_reverse_base(OptLevel level) noexcept {
  return level == OptLevel::opt2 || level == OptLevel::opt1_opt2;
}

std::string_view to_string(OptLevel level) noexcept {
  switch (level) {
    case OptLevel::base: return "base";
    case OptLevel::opt1: return "opt1";
    case OptLevel::opt2: return "opt2";
    case OptLevel::opt1_opt2: return "opt1+opt2";
  }
  return "?";
}

OptLevel parse_opt_level(std::string_view s) {
  if (s == "base") return OptLevel::base;
  if (s == "opt1") return OptLevel::opt1;
  if (s == "opt2") return OptLevel::opt2;
  if (s == "opt1+opt2" || s == "opt1_opt2" || s == "full") return OptLevel::opt1_opt2;
  throw std::invalid_argument("unknown optimization level '" + std::string(s) + "'");
}

std::string TritSegment::to_string(int m) const {
  std::string out(static_cast<std::size_t>(m), '*');
  for (int i = 0; i < m; ++i) {
    const std::uint32_t bit = std::uint32_t{1} << (m - 1 - i);
    if (care & bit) out[static_cast<std::size_t>(i)] = (value & bit) ? '1' : '0';
  }
  return out;
}

TritSegment TritSegment::parse(std::string_view trits) {
  if (trits.empty() || trits.size() > static_cast<std::size_t>(kMaxBits))
    throw FormatError("bad trit string length: '" + std::string(trits) + "'");
  TritSegment seg;
  const int m = static_cast<int>(trits.size());
  for (int i = 0; i < m; ++i) {
    const std::uint32_t bit = std::uint32_t{1} << (m - 1 - i);
    switch (trits[static_cast<std::size_t>(i)]) {
      case '0': seg.care |= bit; break;
      case '1': seg.care |= bit; seg.value |= bit; break;
      case '*': break;
      default: throw FormatError("bad trit in '" + std::string(trits) + "'");
    }
  }
  return seg;
}

bool TernaryEntry::matches(std::span<const std::uint32_t> values) const noexcept {
  for (std::size_t i = 0; i < key.size(); ++i)
    if (!key[i].matches(values[i])) return false;
  return true;
}

TernaryTable::TernaryTable(int n, int m, std::vector<int> tie_order, OptLevel level,
                           std::vector<TernaryEntry> entries)
    : n_(n), m_(m), tie_order_(std::move(tie_order)), level_(level), entries_(std::move(entries)) {
  validate_tie_order(tie_order_, n_);
  for (const auto& e : entries_) {
    if (e.key.size() != static_cast<std::size_t>(n_))
      throw FormatError("entry has wrong segment count");
    if (e.winner >= static_cast<std::uint32_t>(n_)) throw FormatError("entry winner out of range");
  }
}

std::size_t TernaryTable::find_entry(std::span<const std::uint32_t> values) const noexcept {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].matches(values)) return i;
  return entries_.size();
}

std::size_t TernaryTable::lookup(std::span<const std::uint32_t> values) const {
  if (values.size() != static_cast<std::size_t>(n_))
    throw std::invalid_argument("argmax lookup: expected " + std::to_string(n_) + " values");
  const std::size_t hit = find_entry(values);
  if (hit == entries_.size()) {
    std::fprintf(stderr, "argmax table miss (n=%d m=%d level=%s entries=%zu) on input:", n_, m_,
                 std::string(to_string(level_)).c_str(), entries_.size());
    for (auto v : values) std::fprintf(stderr, " %u", v);
    std::fprintf(stderr, "\n");
    std::abort();
  }
  return entries_[hit].winner;
}

std::vector<int> default_tie_order(int n) {
  std::vector<int> order(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  return order;
}

void validate_tie_order(std::span<const int> order, int n) {
  if (order.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("tie order must list exactly n indices");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int idx : order) {
    if (idx < 0 || idx >= n || seen[static_cast<std::size_t>(idx)])
      throw std::invalid_argument("tie order is not a permutation of [0, n)");
    seen[static_cast<std::size_t>(idx)] = true;
  }
}

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw CountOverflow("argmax entry count overflow");
  return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw CountOverflow("argmax entry count overflow");
  return r;
}

std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = checked_mul(r, static_cast<std::uint64_t>(n - k + i)) / i;
  return r;
}

void check_shape(int n, int m) {
  if (n < 1) throw std::invalid_argument("argmax: n must be >= 1");
  if (m < 1) throw std::invalid_argument("argmax: m must be >= 1");
}

// Emits entries depth-first. `cands` are the still-competing indices sorted by
// tie precedence; `key` holds the constraints fixed by the enclosing branches.
class Generator {
 public:
  Generator(int n, int m, OptLevel level, std::vector<TernaryEntry>& out)
      : n_(n), m_(m), level_(level), out_(out), key_(static_cast<std::size_t>(n)) {}

  void run(const std::vector<int>& cands) { expand(cands, 0); }

 private:
  void emit(int winner) {
    TernaryEntry e;
    e.key = key_;
    e.priority = static_cast<std::uint32_t>(out_.size());
    e.winner = static_cast<std::uint32_t>(winner);
    out_.push_back(std::move(e));
  }

  void set_bit(int idx, std::uint32_t bit, bool one) {
    auto& seg = key_[static_cast<std::size_t>(idx)];
    seg.care |= bit;
    if (one) seg.value |= bit; else seg.value &= ~bit;
  }

  void clear_bit(int idx, std::uint32_t bit) {
    auto& seg = key_[static_cast<std::size_t>(idx)];
    seg.care &= ~bit;
    seg.value &= ~bit;
  }

  void apply_pattern(const std::vector<int>& cands, std::uint32_t bit, std::uint64_t pattern) {
    for (std::size_t j = 0; j < cands.size(); ++j) set_bit(cands[j], bit, (pattern >> j) & 1U);
  }

  void clear_pattern(const std::vector<int>& cands, std::uint32_t bit) {
    for (int c : cands) clear_bit(c, bit);
  }

  void expand(const std::vector<int>& cands, int level) {
    if (cands.size() == 1) {
      emit(cands.front());
      return;
    }
    const std::uint32_t bit = std::uint32_t{1} << (m_ - 1 - level);
    const std::size_t k = cands.size();
    const std::uint64_t all = (std::uint64_t{1} << k) - 1;

    if (level == m_ - 1) {
      if (has_reverse_base(level_)) {
        // Lowest precedence first; candidate j wins when every higher-precedence
        // candidate shows 0 and it shows 1. The catch-all goes to the top one.
        for (std::size_t j = k - 1; j >= 1; --j) {
          for (std::size_t i = 0; i < j; ++i) set_bit(cands[i], bit, false);
          set_bit(cands[j], bit, true);
          emit(cands[j]);
          clear_pattern(cands, bit);
        }
        emit(cands.front());
      } else {
        for (std::uint64_t pattern = all;; --pattern) {
          apply_pattern(cands, bit, pattern);
          int winner = cands.front();
          for (std::size_t j = 0; j < k; ++j) {
            if ((pattern >> j) & 1U) {
              winner = cands[j];
              break;
            }
          }
          emit(winner);
          clear_pattern(cands, bit);
          if (pattern == 0) break;
        }
      }
      return;
    }

    // Mixed MSB patterns: only the candidates showing 1 stay in the race.
    std::vector<int> survivors;
    survivors.reserve(k);
    for (std::uint64_t pattern = all - 1; pattern >= 1; --pattern) {
      survivors.clear();
      for (std::size_t j = 0; j < k; ++j)
        if ((pattern >> j) & 1U) survivors.push_back(cands[j]);
      apply_pattern(cands, bit, pattern);
      expand(survivors, level + 1);
      clear_pattern(cands, bit);
    }

    if (has_merge(level_)) {
      // All-equal bit: wildcard, handled after every mixed case.
      expand(cands, level + 1);
    } else {
      apply_pattern(cands, bit, all);
      expand(cands, level + 1);
      apply_pattern(cands, bit, 0);
      expand(cands, level + 1);
      clear_pattern(cands, bit);
    }
  }

  int n_;
  int m_;
  OptLevel level_;
  std::vector<TernaryEntry>& out_;
  std::vector<TritSegment> key_;
};

}  // namespace

std::uint64_t count_entries(int n, int m, OptLevel level) {
  check_shape(n, m);
  // table[i][b] = F(i, b) for i in [1, n], b in [1, m]
  std::vector<std::vector<std::uint64_t>> f(static_cast<std::size_t>(n) + 1,
                                            std::vector<std::uint64_t>(static_cast<std::size_t>(m) + 1, 0));
  for (int b = 1; b <= m; ++b) f[1][static_cast<std::size_t>(b)] = 1;
  for (int i = 2; i <= n; ++i) {
    if (has_reverse_base(level)) {
      f[static_cast<std::size_t>(i)][1] = static_cast<std::uint64_t>(i);
    } else {
      if (i >= 64) throw CountOverflow("argmax entry count overflow");
      f[static_cast<std::size_t>(i)][1] = std::uint64_t{1} << i;
    }
  }
  const std::uint64_t same_factor = has_merge(level) ? 1 : 2;
  for (int b = 2; b <= m; ++b) {
    for (int i = 2; i <= n; ++i) {
      std::uint64_t v = checked_mul(same_factor, f[static_cast<std::size_t>(i)][static_cast<std::size_t>(b - 1)]);
      for (int j = 1; j < i; ++j)
        v = checked_add(v, checked_mul(binomial(i, j), f[static_cast<std::size_t>(j)][static_cast<std::size_t>(b - 1)]));
      f[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)] = v;
    }
  }
  return f[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
}

TernaryTable generate_table(int n, int m, std::span<const int> tie_order, OptLevel level,
                            std::size_t max_entries) {
  check_shape(n, m);
  if (m > kMaxBits) throw std::invalid_argument("argmax: m must be <= 32");
  if (n > 62) throw std::invalid_argument("argmax: n must be <= 62");
  validate_tie_order(tie_order, n);
  const std::uint64_t expected = count_entries(n, m, level);
  if (expected > max_entries) throw TableTooLarge("argmax table too large", expected);

  std::vector<TernaryEntry> entries;
  entries.reserve(static_cast<std::size_t>(expected));
  std::vector<int> cands(tie_order.begin(), tie_order.end());
  Generator(n, m, level, entries).run(cands);
  if (entries.size() != expected)
    throw std::logic_error("argmax generator emitted " + std::to_string(entries.size()) +
                           " entries, expected " + std::to_string(expected));
  return TernaryTable(n, m, cands, level, std::move(entries));
}

int compare_pair_by_subtraction(std::uint32_t a, std::uint32_t b) noexcept {
  const std::int64_t tmp = static_cast<std::int64_t>(a) - static_cast<std::int64_t>(b);
  return tmp > 0 ? 0 : 1;
}

}  // namespace wirenn::argmax

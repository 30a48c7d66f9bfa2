#pragma once

// Single-lookup argmax over n unsigned m-bit numbers realized as a
// priority-ordered ternary (0/1/wildcard) match table.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wirenn::argmax {

inline constexpr int kMaxBits = 32;
inline constexpr std::size_t kDefaultMaxEntries = std::size_t{1} << 20;

/// Which construction tricks are enabled.
///   opt1: all-equal MSB cases merged into a single wildcard branch (emitted last)
///   opt2: reverse encoding of the one-bit base case (n entries instead of 2^n)
enum class OptLevel { base, opt1, opt2, opt1_opt2 };

bool has_merge(OptLevel level) noexcept;
bool has_reverse_base(OptLevel level) noexcept;
std::string_view to_string(OptLevel level) noexcept;
OptLevel parse_opt_level(std::string_view s);

/// m trits stored as a care mask and a value mask. Bit i of the masks is bit i
/// of the number (LSB = 0). A trit is a wildcard when its care bit is clear.
struct TritSegment {
  std::uint32_t care = 0;
  std::uint32_t value = 0;

  bool matches(std::uint32_t x) const noexcept { return (x & care) == value; }
  /// MSB-first string over {0,1,*}.
  std::string to_string(int m) const;
  static TritSegment parse(std::string_view trits);

  friend bool operator==(const TritSegment&, const TritSegment&) = default;
};

struct TernaryEntry {
  std::vector<TritSegment> key;
  std::uint32_t priority = 0;
  std::uint32_t winner = 0;

  bool matches(std::span<const std::uint32_t> values) const noexcept;
  friend bool operator==(const TernaryEntry&, const TernaryEntry&) = default;
};

class TernaryTable {
 public:
  TernaryTable() = default;
  TernaryTable(int n, int m, std::vector<int> tie_order, OptLevel level,
               std::vector<TernaryEntry> entries);

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  OptLevel level() const noexcept { return level_; }
  const std::vector<int>& tie_order() const noexcept { return tie_order_; }
  const std::vector<TernaryEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// First-match lookup. A miss means the table is not total, which is a
  /// construction defect: diagnostics go to stderr and the process aborts.
  std::size_t lookup(std::span<const std::uint32_t> values) const;

  /// Lookup returning the index of the matching entry, or size() on a miss.
  std::size_t find_entry(std::span<const std::uint32_t> values) const noexcept;

  friend bool operator==(const TernaryTable&, const TernaryTable&) = default;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<int> tie_order_;
  OptLevel level_ = OptLevel::opt1_opt2;
  std::vector<TernaryEntry> entries_;
};

/// Ascending index order: index 0 wins ties.
std::vector<int> default_tie_order(int n);

/// Throws std::invalid_argument unless `order` is a permutation of [0, n).
void validate_tie_order(std::span<const int> order, int n);

/// Entry count produced by generate_table for (n, m, level).
/// Throws CountOverflow if the count does not fit 64 bits.
std::uint64_t count_entries(int n, int m, OptLevel level);

/// Builds the table. Throws std::invalid_argument on n<1, m<1, m>32 or a bad
/// tie order, and TableTooLarge when count_entries exceeds max_entries.
TernaryTable generate_table(int n, int m, std::span<const int> tie_order,
                            OptLevel level = OptLevel::opt1_opt2,
                            std::size_t max_entries = kDefaultMaxEntries);

inline TernaryTable generate_table(int n, int m, OptLevel level = OptLevel::opt1_opt2) {
  return generate_table(n, m, default_tie_order(n), level);
}

/// Two-number comparison as a conditional statement would do it on a switch
/// (tmp = a - b; tmp > 0 ? A : B). Returns 0 when a wins, 1 otherwise; ties go
/// to b. Reference only: it does not generalize to n numbers.
int compare_pair_by_subtraction(std::uint32_t a, std::uint32_t b) noexcept;

// Text format:
//   n m tie_order level
//   priority  seg0 seg1 ... seg{n-1}  winner
// tie_order is comma separated, segments are MSB-first trit strings.
void write_table(std::ostream& os, const TernaryTable& table);
TernaryTable read_table(std::istream& is);
std::string dump_table(const TernaryTable& table);
TernaryTable parse_table(const std::string& text);

}  // namespace wirenn::argmax

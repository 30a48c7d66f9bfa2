#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wirenn::rnn {

/// Binarized activation vector. Component i is bit i; 1 encodes +1, 0 encodes -1.
class BitVec {
 public:
  static constexpr int kMaxWidth = 64;

  BitVec() = default;
  BitVec(int width, std::uint64_t bits);

  int width() const noexcept { return width_; }
  std::uint64_t bits() const noexcept { return bits_; }
  bool bit(int i) const noexcept { return (bits_ >> i) & 1U; }
  /// +1.0 or -1.0
  double sign_at(int i) const noexcept { return bit(i) ? 1.0 : -1.0; }
  std::vector<double> decode() const;

  /// Component 0 first, e.g. "10" for (+1, -1).
  std::string to_string() const;

  friend bool operator==(const BitVec&, const BitVec&) = default;

 private:
  int width_ = 0;
  std::uint64_t bits_ = 0;
};

/// Sign binarization with sign(0) = +1. Throws std::invalid_argument on NaN.
BitVec binarize(std::span<const double> x);

inline std::uint64_t width_mask(int width) noexcept {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

}  // namespace wirenn::rnn

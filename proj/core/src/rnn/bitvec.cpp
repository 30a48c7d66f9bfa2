#include "wirenn/rnn/bitvec.hpp"

#include <cmath>
#include <stdexcept>

namespace wirenn::rnn {

BitVec::BitVec(int width, std::uint64_t bits) : width_(width), bits_(bits) {
  if (width <= 0 || width > kMaxWidth) throw std::invalid_argument("BitVec width out of range");
  if (bits & ~width_mask(width)) throw std::invalid_argument("BitVec has bits beyond its width");
}

std::vector<double> BitVec::decode() const {
  std::vector<double> out(static_cast<std::size_t>(width_));
  for (int i = 0; i < width_; ++i) out[static_cast<std::size_t>(i)] = sign_at(i);
  return out;
}

std::string BitVec::to_string() const {
  std::string s(static_cast<std::size_t>(width_), '0');
  for (int i = 0; i < width_; ++i)
    if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

BitVec binarize(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("binarize: empty vector");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i])) throw std::invalid_argument("binarize: NaN input");
    if (x[i] >= 0.0) bits |= std::uint64_t{1} << i;
  }
  return BitVec(static_cast<int>(x.size()), bits);
}

}  // namespace wirenn::rnn

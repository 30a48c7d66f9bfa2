#include "wirenn/flow/hash.hpp"

#include <charconv>
#include <stdexcept>

namespace wirenn::flow {

std::array<std::uint8_t, kKeyBytes> encode(const FiveTuple& t) noexcept {
  return {static_cast<std::uint8_t>(t.src >> 24),  static_cast<std::uint8_t>(t.src >> 16),
          static_cast<std::uint8_t>(t.src >> 8),   static_cast<std::uint8_t>(t.src),
          static_cast<std::uint8_t>(t.dst >> 24),  static_cast<std::uint8_t>(t.dst >> 16),
          static_cast<std::uint8_t>(t.dst >> 8),   static_cast<std::uint8_t>(t.dst),
          static_cast<std::uint8_t>(t.sport >> 8), static_cast<std::uint8_t>(t.sport),
          static_cast<std::uint8_t>(t.dport >> 8), static_cast<std::uint8_t>(t.dport),
          t.proto};
}

FiveTuple decode(std::span<const std::uint8_t, kKeyBytes> b) noexcept {
  auto u32 = [&](std::size_t i) {
    return (std::uint32_t{b[i]} << 24) | (std::uint32_t{b[i + 1]} << 16) | (std::uint32_t{b[i + 2]} << 8) | b[i + 3];
  };
  auto u16 = [&](std::size_t i) { return static_cast<std::uint16_t>((b[i] << 8) | b[i + 1]); };
  return {u32(0), u32(4), u16(8), u16(10), b[12]};
}

namespace {

constexpr std::uint32_t rotl32(std::uint32_t x, int r) noexcept { return (x << r) | (x >> (32 - r)); }

constexpr std::uint32_t fmix32(std::uint32_t h) noexcept {
  h ^= h >> 16;
  h *= 0x85ebca6bu;
  h ^= h >> 13;
  h *= 0xc2b2ae35u;
  h ^= h >> 16;
  return h;
}

}  // namespace

std::uint32_t murmur3_32(std::span<const std::uint8_t> data, std::uint32_t seed) noexcept {
  constexpr std::uint32_t c1 = 0xcc9e2d51u;
  constexpr std::uint32_t c2 = 0x1b873593u;
  const std::size_t len = data.size();
  const std::size_t nblocks = len / 4;
  std::uint32_t h1 = seed;

  for (std::size_t i = 0; i < nblocks; ++i) {
    const auto* p = data.data() + 4 * i;
    std::uint32_t k1 = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
                       (std::uint32_t{p[3]} << 24);
    k1 *= c1;
    k1 = rotl32(k1, 15);
    k1 *= c2;
    h1 ^= k1;
    h1 = rotl32(h1, 13);
    h1 = h1 * 5 + 0xe6546b64u;
  }

  const auto* tail = data.data() + 4 * nblocks;
  std::uint32_t k1 = 0;
  switch (len & 3) {
    case 3:
      k1 ^= std::uint32_t{tail[2]} << 16;
      [[fallthrough]];
    case 2:
      k1 ^= std::uint32_t{tail[1]} << 8;
      [[fallthrough]];
    case 1:
      k1 ^= tail[0];
      k1 *= c1;
      k1 = rotl32(k1, 15);
      k1 *= c2;
      h1 ^= k1;
  }
  h1 ^= static_cast<std::uint32_t>(len);
  return fmix32(h1);
}

std::string format_ipv4(std::uint32_t a) {
  return std::to_string(a >> 24) + "." + std::to_string((a >> 16) & 0xFF) + "." + std::to_string((a >> 8) & 0xFF) +
         "." + std::to_string(a & 0xFF);
}

std::uint32_t parse_ipv4(const std::string& s) {
  std::uint32_t out = 0;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  for (int part = 0; part < 4; ++part) {
    unsigned v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || next == p || v > 255) throw std::invalid_argument("bad IPv4 address '" + s + "'");
    out = (out << 8) | v;
    p = next;
    if (part < 3) {
      if (p == end || *p != '.') throw std::invalid_argument("bad IPv4 address '" + s + "'");
      ++p;
    }
  }
  if (p != end) throw std::invalid_argument("bad IPv4 address '" + s + "'");
  return out;
}

std::string to_string(const FiveTuple& t) {
  return format_ipv4(t.src) + ":" + std::to_string(t.sport) + "->" + format_ipv4(t.dst) + ":" +
         std::to_string(t.dport) + "/" + std::to_string(t.proto);
}

}  // namespace wirenn::flow

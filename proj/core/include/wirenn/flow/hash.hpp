#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace wirenn::flow {

struct FiveTuple {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint16_t sport = 0;
  std::uint16_t dport = 0;
  std::uint8_t proto = 0;

  friend bool operator==(const FiveTuple&, const FiveTuple&) = default;
  friend auto operator<=>(const FiveTuple&, const FiveTuple&) = default;
};

inline constexpr std::size_t kKeyBytes = 13;

/// src(4) dst(4) sport(2) dport(2) proto(1), each field big-endian.
std::array<std::uint8_t, kKeyBytes> encode(const FiveTuple& t) noexcept;
FiveTuple decode(std::span<const std::uint8_t, kKeyBytes> bytes) noexcept;

/// MurmurHash3_x86_32.
std::uint32_t murmur3_32(std::span<const std::uint8_t> data, std::uint32_t seed) noexcept;

inline std::uint32_t hash_tuple(const FiveTuple& t, std::uint32_t seed) noexcept {
  const auto b = encode(t);
  return murmur3_32(b, seed);
}

/// Dotted quad.
std::string format_ipv4(std::uint32_t addr);
/// Throws std::invalid_argument on malformed input.
std::uint32_t parse_ipv4(const std::string& s);

std::string to_string(const FiveTuple& t);

struct FiveTupleHash {
  std::size_t operator()(const FiveTuple& t) const noexcept { return hash_tuple(t, 0x2545f491u); }
};

}  // namespace wirenn::flow

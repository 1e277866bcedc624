#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agri {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

/// 32-byte SHA-256 output. Ordered bytewise, which is also the order of its hex rendering.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  static Digest zero() { return {}; }
  /// Parses exactly 64 hex characters (either case). Throws Error(Malformed).
  static Digest from_hex(std::string_view hex);

  std::string hex() const;
  bool is_zero() const;

  auto operator<=>(const Digest&) const = default;
  bool operator==(const Digest&) const = default;
};

Digest sha256(ByteSpan data);
Digest sha256(std::string_view data);

std::string to_hex(ByteSpan data);
Bytes from_hex(std::string_view hex);

/// Number of leading zero bits, most significant bit of byte 0 first.
int leading_zero_bits(const Digest& d);

}  // namespace agri

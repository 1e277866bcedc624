#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "agri/digest.hpp"

namespace agri {

using PublicKey = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;
using KeySeed = std::array<std::uint8_t, 32>;

/// Ed25519 signing key. The 32-byte seed fully determines the pair.
class KeyPair {
 public:
  static KeyPair generate();
  static KeyPair from_seed(const KeySeed& seed);
  /// Deterministic key for tests and simulations: seed = SHA-256(label).
  static KeyPair from_label(std::string_view label);

  const PublicKey& public_key() const { return public_key_; }
  const KeySeed& seed() const { return seed_; }
  Digest actor_id() const;

  Signature sign(ByteSpan message) const;

 private:
  KeySeed seed_{};
  PublicKey public_key_{};
  std::array<std::uint8_t, 64> secret_key_{};
};

bool verify_signature(const PublicKey& key, ByteSpan message, const Signature& sig);

/// Actor identifier: SHA-256 of the raw public key.
Digest actor_id_of(const PublicKey& key);

}  // namespace agri

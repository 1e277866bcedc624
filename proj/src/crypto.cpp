#include "agri/crypto.hpp"

#include <sodium.h>

#include "agri/error.hpp"

namespace agri {

namespace {

void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw Error(ErrorCode::IoFailure, "libsodium failed to initialise");
}

}  // namespace

KeyPair KeyPair::from_seed(const KeySeed& seed) {
  ensure_sodium();
  KeyPair kp;
  kp.seed_ = seed;
  crypto_sign_seed_keypair(kp.public_key_.data(), kp.secret_key_.data(), seed.data());
  return kp;
}

KeyPair KeyPair::generate() {
  ensure_sodium();
  KeySeed seed;
  randombytes_buf(seed.data(), seed.size());
  return from_seed(seed);
}

KeyPair KeyPair::from_label(std::string_view label) { return from_seed(sha256(label).bytes); }

Digest KeyPair::actor_id() const { return actor_id_of(public_key_); }

Signature KeyPair::sign(ByteSpan message) const {
  Signature sig;
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_key_.data());
  return sig;
}

bool verify_signature(const PublicKey& key, ByteSpan message, const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.data(), message.data(), message.size(), key.data()) == 0;
}

Digest actor_id_of(const PublicKey& key) { return sha256(key); }

}  // namespace agri

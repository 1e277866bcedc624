#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agri/codec.hpp"
#include "agri/digest.hpp"
#include "agri/params.hpp"
#include "agri/transaction.hpp"

namespace agri {

inline constexpr std::uint32_t kBlockVersion = 1;
/// Canonical header size: u32 version, prev hash, merkle root, i64 timestamp,
/// u8 difficulty, u64 nonce, u32 tx_count.
inline constexpr std::size_t kHeaderSize = 4 + 32 + 32 + 8 + 1 + 8 + 4;

struct BlockHeader {
  std::uint32_t version = kBlockVersion;
  Digest prev_hash;
  Digest merkle_root;
  std::int64_t timestamp = 0;
  std::uint8_t difficulty = 0;
  std::uint64_t nonce = 0;
  std::uint32_t tx_count = 0;

  bool operator==(const BlockHeader&) const = default;
};

struct Block {
  BlockHeader header;
  std::vector<Transaction> transactions;

  Digest hash() const;
  std::vector<Digest> tx_ids() const;

  bool operator==(const Block&) const = default;
};

enum class Side : std::uint8_t { Left, Right };

/// One fold step: `side` is where the sibling sits relative to the running hash.
struct ProofStep {
  Digest sibling;
  Side side = Side::Left;
  bool operator==(const ProofStep&) const = default;
};

/// Inclusion proof for a transaction id. `leaf` is the raw tx id; folding starts
/// from its leaf hash.
struct MerkleProof {
  Digest leaf;
  std::vector<ProofStep> path;
  Digest root;
  bool operator==(const MerkleProof&) const = default;
};

Bytes header_bytes(const BlockHeader& h);
BlockHeader decode_header(Reader& r);
Digest block_hash(const BlockHeader& h);

Digest merkle_leaf_hash(const Digest& tx_id);
Digest merkle_node_hash(const Digest& left, const Digest& right);
Digest merkle_root(std::span<const Digest> tx_ids);

/// Throws Error(TxNotInBlock).
MerkleProof merkle_proof(const Block& block, const Digest& tx_id);
MerkleProof merkle_proof(std::span<const Digest> tx_ids, const Digest& tx_id);
bool verify_proof(const MerkleProof& proof);

bool meets_difficulty(const Digest& hash, int difficulty);

struct MineStats {
  std::uint64_t nonces_tried = 0;
};

/// Sequential nonce search from 0. Throws Error(InvalidArgument) for difficulty
/// outside [0, 255] and Error(NonceExhausted) if no 64-bit nonce works.
Block mine_block(const Digest& prev, std::vector<Transaction> txs, int difficulty, std::int64_t timestamp,
                 MineStats* stats = nullptr);

/// The fixed, PoW-exempt first block of a network.
Block make_genesis(const ChainParams& params);

struct ChainCheck {
  std::optional<std::size_t> first_invalid;
  std::string reason;

  bool ok() const { return !first_invalid.has_value(); }
};

/// Structural checks of `block` as a child of `parent`: link, declared and achieved
/// difficulty, timestamp monotonicity, tx_count, merkle root, and transaction
/// signatures. Returns a reason on failure.
std::optional<std::string> check_block(const Block& block, const BlockHeader& parent, std::uint8_t difficulty);

/// Returns the smallest failing index. Every non-genesis block must declare the
/// genesis difficulty. Throws Error(EmptyChain).
ChainCheck validate_chain(std::span<const Block> blocks, const Digest& genesis_digest);

void encode(Writer& w, const Block& b);
Block decode_block(Reader& r);
Bytes encode_block(const Block& b);
Block decode_block(ByteSpan bytes);

}  // namespace agri

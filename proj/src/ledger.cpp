#include "agri/ledger.hpp"

#include <algorithm>
#include <limits>

#include "agri/error.hpp"

namespace agri {

namespace {

void write_header(Writer& w, const BlockHeader& h) {
  w.u32(h.version);
  w.digest(h.prev_hash);
  w.digest(h.merkle_root);
  w.i64(h.timestamp);
  w.u8(h.difficulty);
  w.u64(h.nonce);
  w.u32(h.tx_count);
}

// Header bytes with the nonce at a fixed offset so mining can patch it in place.
constexpr std::size_t kNonceOffset = 4 + 32 + 32 + 8 + 1;

}  // namespace

Bytes header_bytes(const BlockHeader& h) {
  Writer w;
  write_header(w, h);
  return w.take();
}

BlockHeader decode_header(Reader& r) {
  BlockHeader h;
  h.version = r.u32();
  h.prev_hash = r.digest();
  h.merkle_root = r.digest();
  h.timestamp = r.i64();
  h.difficulty = r.u8();
  h.nonce = r.u64();
  h.tx_count = r.u32();
  return h;
}

Digest block_hash(const BlockHeader& h) { return sha256(header_bytes(h)); }

Digest Block::hash() const { return block_hash(header); }

std::vector<Digest> Block::tx_ids() const {
  std::vector<Digest> ids;
  ids.reserve(transactions.size());
  for (const auto& t : transactions) ids.push_back(t.id());
  return ids;
}

Digest merkle_leaf_hash(const Digest& tx_id) {
  std::array<std::uint8_t, 33> buf{};
  buf[0] = 0x00;
  std::copy(tx_id.bytes.begin(), tx_id.bytes.end(), buf.begin() + 1);
  return sha256(buf);
}

Digest merkle_node_hash(const Digest& left, const Digest& right) {
  std::array<std::uint8_t, 65> buf{};
  buf[0] = 0x01;
  std::copy(left.bytes.begin(), left.bytes.end(), buf.begin() + 1);
  std::copy(right.bytes.begin(), right.bytes.end(), buf.begin() + 33);
  return sha256(buf);
}

namespace {

std::vector<Digest> next_level(const std::vector<Digest>& level) {
  std::vector<Digest> up;
  up.reserve((level.size() + 1) / 2);
  for (std::size_t i = 0; i < level.size(); i += 2) {
    const auto& right = i + 1 < level.size() ? level[i + 1] : level[i];
    up.push_back(merkle_node_hash(level[i], right));
  }
  return up;
}

std::vector<Digest> leaf_level(std::span<const Digest> tx_ids) {
  std::vector<Digest> level;
  level.reserve(tx_ids.size());
  for (const auto& id : tx_ids) level.push_back(merkle_leaf_hash(id));
  return level;
}

}  // namespace

Digest merkle_root(std::span<const Digest> tx_ids) {
  if (tx_ids.empty()) return sha256(ByteSpan{});
  auto level = leaf_level(tx_ids);
  while (level.size() > 1) level = next_level(level);
  return level.front();
}

MerkleProof merkle_proof(std::span<const Digest> tx_ids, const Digest& tx_id) {
  auto it = std::find(tx_ids.begin(), tx_ids.end(), tx_id);
  if (it == tx_ids.end()) throw Error(ErrorCode::TxNotInBlock, tx_id.hex());

  MerkleProof proof;
  proof.leaf = tx_id;
  auto index = static_cast<std::size_t>(it - tx_ids.begin());
  auto level = leaf_level(tx_ids);
  while (level.size() > 1) {
    bool is_right = index % 2 == 1;
    std::size_t sibling = is_right ? index - 1 : std::min(index + 1, level.size() - 1);
    proof.path.push_back({level[sibling], is_right ? Side::Left : Side::Right});
    level = next_level(level);
    index /= 2;
  }
  proof.root = level.front();
  return proof;
}

MerkleProof merkle_proof(const Block& block, const Digest& tx_id) {
  auto ids = block.tx_ids();
  return merkle_proof(ids, tx_id);
}

bool verify_proof(const MerkleProof& proof) {
  auto acc = merkle_leaf_hash(proof.leaf);
  for (const auto& step : proof.path) {
    acc = step.side == Side::Left ? merkle_node_hash(step.sibling, acc) : merkle_node_hash(acc, step.sibling);
  }
  return acc == proof.root;
}

bool meets_difficulty(const Digest& hash, int difficulty) { return leading_zero_bits(hash) >= difficulty; }

Block mine_block(const Digest& prev, std::vector<Transaction> txs, int difficulty, std::int64_t timestamp,
                 MineStats* stats) {
  if (difficulty < 0 || difficulty > 255) throw Error(ErrorCode::InvalidArgument, "difficulty out of range");
  if (txs.size() > std::numeric_limits<std::uint32_t>::max())
    throw Error(ErrorCode::InvalidArgument, "too many transactions");

  Block block;
  block.transactions = std::move(txs);
  auto& h = block.header;
  h.prev_hash = prev;
  h.timestamp = timestamp;
  h.difficulty = static_cast<std::uint8_t>(difficulty);
  h.tx_count = static_cast<std::uint32_t>(block.transactions.size());
  auto ids = block.tx_ids();
  h.merkle_root = merkle_root(ids);

  auto bytes = header_bytes(h);
  std::uint64_t nonce = 0;
  while (true) {
    for (int i = 0; i < 8; ++i) bytes[kNonceOffset + i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
    if (meets_difficulty(sha256(bytes), difficulty)) {
      h.nonce = nonce;
      if (stats) stats->nonces_tried = nonce + 1;
      return block;
    }
    if (nonce == std::numeric_limits<std::uint64_t>::max()) break;
    ++nonce;
  }
  throw Error(ErrorCode::NonceExhausted, "no nonce satisfies difficulty " + std::to_string(difficulty));
}

Block make_genesis(const ChainParams& params) {
  Block g;
  g.header.version = kBlockVersion;
  g.header.prev_hash = Digest::zero();
  g.header.merkle_root = sha256(ByteSpan{});
  g.header.timestamp = params.genesis_timestamp;
  g.header.difficulty = params.difficulty;
  g.header.nonce = 0;
  g.header.tx_count = 0;
  return g;
}

std::optional<std::string> check_block(const Block& block, const BlockHeader& parent, std::uint8_t difficulty) {
  const auto& h = block.header;
  if (h.version != kBlockVersion) return "unsupported version";
  if (h.prev_hash != block_hash(parent)) return "prev_hash does not link to parent";
  if (h.difficulty != difficulty) return "declared difficulty differs from network difficulty";
  if (!meets_difficulty(block.hash(), h.difficulty)) return "proof of work below declared difficulty";
  if (h.timestamp < parent.timestamp) return "timestamp precedes parent";
  if (h.tx_count != block.transactions.size()) return "tx_count mismatch";
  auto ids = block.tx_ids();
  if (h.merkle_root != merkle_root(ids)) return "merkle root mismatch";
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    if (!verify_signature(block.transactions[i].signer_key, ids[i].bytes, block.transactions[i].signature))
      return "bad signature on transaction " + std::to_string(i);
  }
  return std::nullopt;
}

ChainCheck validate_chain(std::span<const Block> blocks, const Digest& genesis_digest) {
  if (blocks.empty()) throw Error(ErrorCode::EmptyChain);
  if (blocks[0].hash() != genesis_digest || !blocks[0].transactions.empty()) return {0, "genesis mismatch"};
  const auto difficulty = blocks[0].header.difficulty;
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    if (auto reason = check_block(blocks[i], blocks[i - 1].header, difficulty)) return {i, *reason};
  }
  return {};
}

void encode(Writer& w, const Block& b) {
  write_header(w, b.header);
  w.count(b.transactions.size());
  for (const auto& t : b.transactions) encode(w, t);
}

Block decode_block(Reader& r) {
  Block b;
  b.header = decode_header(r);
  auto n = r.count(1 + 4 + 32 + 8 + 4 + 64);
  b.transactions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) b.transactions.push_back(decode_transaction(r));
  return b;
}

Bytes encode_block(const Block& b) {
  Writer w;
  encode(w, b);
  return w.take();
}

Block decode_block(ByteSpan bytes) {
  Reader r(bytes);
  auto b = decode_block(r);
  r.expect_done();
  return b;
}

}  // namespace agri

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "agri/chainstate.hpp"
#include "agri/ledger.hpp"

namespace agri {

struct ChainTip {
  std::uint64_t height = 0;
  Digest digest;
  bool operator==(const ChainTip&) const = default;
};

/// Greatest height wins; equal heights go to the smaller digest. Throws Error(NoCandidates).
ChainTip fork_choice(std::span<const ChainTip> candidates);

/// True when `a` beats `b` under fork_choice.
bool preferred(const ChainTip& a, const ChainTip& b);

enum class MessageKind : std::uint8_t { TxAnnounce, BlockAnnounce, InventoryRequest, InventoryResponse };

std::string_view to_string(MessageKind k);

/// Payloads: TxAnnounce carries an encoded transaction, BlockAnnounce an encoded
/// block, InventoryRequest a list of block digests, InventoryResponse a list of
/// encoded blocks (oldest first).
struct Message {
  MessageKind kind = MessageKind::TxAnnounce;
  Bytes payload;
  bool operator==(const Message&) const = default;
};

Message tx_announce(const Transaction& tx);
Message block_announce(const Block& block);
Message inventory_request(std::span<const Digest> digests);
Message inventory_response(std::span<const Block> blocks);

Bytes encode_message(const Message& m);
/// Checks the kind tag and that the payload decodes under it. Throws Error(Malformed).
Message decode_message(ByteSpan bytes);

/// Outgoing message; `to` empty means every peer.
struct Envelope {
  std::optional<std::size_t> to;
  Message message;
};

struct NodeCounters {
  std::uint64_t malformed = 0;
  std::uint64_t rejected_txs = 0;
  std::uint64_t rejected_blocks = 0;
  std::uint64_t reorgs = 0;
};

/// One participant's view of the network: every valid block it has seen, the
/// orphans waiting for ancestors, the adopted tip and a FIFO mempool.
class Node {
 public:
  /// Blocks returned for one inventory request: the requested block and its ancestors.
  static constexpr std::size_t kInventoryDepth = 64;

  explicit Node(ChainParams params);
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;
  Node(Node&&) = default;
  Node& operator=(Node&&) = default;

  /// Decodes and dispatches one message from peer `from`. Malformed bytes are counted and dropped.
  std::vector<Envelope> handle_message(std::size_t from, ByteSpan bytes);
  std::vector<Envelope> handle_message(std::size_t from, const Message& message);

  /// Mempool admission for a locally submitted transaction.
  Status submit(const Transaction& tx);

  /// Adds a block received out of band (log replay, tests). Returns whether the tip changed.
  /// Throws Error(NotChild) for an unknown parent, ReplayError for an invalid block.
  bool add_block(const Block& block);

  /// Builds and mines a block over the tip from mempool transactions that are
  /// still valid in order, adopts it and returns it.
  Block mine(std::int64_t timestamp, std::size_t max_txs = 256);

  /// Tip block plus up to `depth` ancestors, oldest first.
  std::vector<Block> tip_segment(std::size_t depth) const;

  ChainTip tip() const { return {tip_->height, tip_->digest}; }
  const Block& tip_block() const { return tip_->block; }
  std::shared_ptr<const WorldState> tip_state() const { return tip_state_; }
  /// Tip state with every mempool transaction applied.
  const WorldState& pending_state() const { return pending_; }
  const Digest& genesis_digest() const { return genesis_; }
  const ChainParams& params() const { return params_; }

  const Block* block(const Digest& digest) const;
  std::optional<std::uint64_t> height_of(const Digest& digest) const;
  /// Whether `digest` lies on the adopted chain.
  bool on_main_chain(const Digest& digest) const;
  /// Adopted chain from genesis to tip.
  std::vector<Block> main_chain() const;
  std::vector<BlockHeader> main_headers() const;

  const std::deque<Transaction>& mempool() const { return mempool_; }
  bool in_mempool(const Digest& tx_id) const { return mempool_ids_.contains(tx_id); }
  std::size_t orphan_count() const { return orphans_.size(); }
  const NodeCounters& counters() const { return counters_; }

  /// Wall-clock used to validate mempool admissions; never earlier than the tip.
  void set_time(std::int64_t now) { now_ = now; }
  std::int64_t admission_time() const;

 private:
  struct Entry {
    Block block;
    Digest digest;
    std::uint64_t height = 0;
    const Entry* parent = nullptr;
    mutable std::shared_ptr<const WorldState> state;  // pruned on deep main-chain blocks
  };

  enum class Accept { Known, Connected, Orphaned, Invalid };

  Accept accept(const Block& block, const Digest& digest, std::vector<Digest>* missing);
  bool connect(const Block& block, const Digest& digest, const Entry& parent);
  void connect_orphans(const Digest& parent, bool& tip_changed);
  void set_tip(const Entry& entry);
  void rebuild_mempool(std::vector<Transaction> prefix);
  void prune_snapshots();
  std::shared_ptr<const WorldState> state_of(const Entry& entry) const;
  const Entry* ancestor_at(const Entry* entry, std::uint64_t height) const;
  Digest missing_root(const Digest& orphan) const;

  std::vector<Envelope> on_tx(const Transaction& tx);
  std::vector<Envelope> on_blocks(std::size_t from, std::span<const Block> blocks);
  std::vector<Envelope> on_request(std::size_t from, std::span<const Digest> digests);

  ChainParams params_;
  Digest genesis_;
  std::map<Digest, std::unique_ptr<Entry>> entries_;
  std::map<Digest, Block> orphans_;
  std::multimap<Digest, Digest> orphans_by_parent_;
  std::set<Digest> invalid_;
  const Entry* tip_ = nullptr;
  std::shared_ptr<const WorldState> tip_state_;
  WorldState pending_;
  std::deque<Transaction> mempool_;
  std::set<Digest> mempool_ids_;
  std::int64_t now_ = 0;
  NodeCounters counters_;
};

}  // namespace agri

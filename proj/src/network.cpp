#include "agri/network.hpp"

#include <algorithm>

namespace agri {

namespace {

constexpr std::size_t kMaxOrphans = 1024;
constexpr std::uint64_t kSnapshotKeep = 64;     // recent main-chain blocks keep their state
constexpr std::uint64_t kSnapshotStride = 64;   // older ones only at this stride

struct Payload {
  MessageKind kind = MessageKind::TxAnnounce;
  std::vector<Transaction> txs;
  std::vector<Block> blocks;
  std::vector<Digest> digests;
};

Payload decode_payload(MessageKind kind, ByteSpan bytes) {
  Payload p{kind, {}, {}, {}};
  Reader r(bytes);
  switch (kind) {
    case MessageKind::TxAnnounce: p.txs.push_back(decode_transaction(r)); break;
    case MessageKind::BlockAnnounce: p.blocks.push_back(decode_block(r)); break;
    case MessageKind::InventoryRequest: {
      auto n = r.count(32);
      for (std::size_t i = 0; i < n; ++i) p.digests.push_back(r.digest());
      break;
    }
    case MessageKind::InventoryResponse: {
      auto n = r.count(4);
      for (std::size_t i = 0; i < n; ++i) p.blocks.push_back(decode_block(ByteSpan(r.bytes())));
      break;
    }
  }
  r.expect_done();
  return p;
}

Message split(ByteSpan bytes) {
  Reader r(bytes);
  Message m;
  m.kind = r.tag<MessageKind>(3);
  m.payload = r.bytes();
  r.expect_done();
  return m;
}

}  // namespace

bool preferred(const ChainTip& a, const ChainTip& b) {
  if (a.height != b.height) return a.height > b.height;
  return a.digest < b.digest;
}

ChainTip fork_choice(std::span<const ChainTip> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::NoCandidates);
  const ChainTip* best = &candidates.front();
  for (const auto& c : candidates.subspan(1))
    if (preferred(c, *best)) best = &c;
  return *best;
}

std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::TxAnnounce: return "TxAnnounce";
    case MessageKind::BlockAnnounce: return "BlockAnnounce";
    case MessageKind::InventoryRequest: return "InventoryRequest";
    case MessageKind::InventoryResponse: return "InventoryResponse";
  }
  return "";
}

Message tx_announce(const Transaction& tx) { return {MessageKind::TxAnnounce, encode_transaction(tx)}; }

Message block_announce(const Block& block) { return {MessageKind::BlockAnnounce, encode_block(block)}; }

Message inventory_request(std::span<const Digest> digests) {
  Writer w;
  w.count(digests.size());
  for (const auto& d : digests) w.digest(d);
  return {MessageKind::InventoryRequest, w.take()};
}

Message inventory_response(std::span<const Block> blocks) {
  Writer w;
  w.count(blocks.size());
  for (const auto& b : blocks) w.bytes(encode_block(b));
  return {MessageKind::InventoryResponse, w.take()};
}

Bytes encode_message(const Message& m) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.bytes(m.payload);
  return w.take();
}

Message decode_message(ByteSpan bytes) {
  auto m = split(bytes);
  decode_payload(m.kind, m.payload);
  return m;
}

Node::Node(ChainParams params) : params_(std::move(params)) {
  auto genesis = make_genesis(params_);
  genesis_ = genesis.hash();
  auto entry = std::make_unique<Entry>();
  entry->state = std::make_shared<const WorldState>(apply_block(WorldState{}, genesis, params_, false));
  entry->block = std::move(genesis);
  entry->digest = genesis_;
  tip_ = entry.get();
  tip_state_ = entry->state;
  pending_ = *tip_state_;
  entries_.emplace(genesis_, std::move(entry));
}

std::int64_t Node::admission_time() const { return std::max(now_, tip_->block.header.timestamp); }

const Block* Node::block(const Digest& digest) const {
  auto it = entries_.find(digest);
  return it == entries_.end() ? nullptr : &it->second->block;
}

std::optional<std::uint64_t> Node::height_of(const Digest& digest) const {
  auto it = entries_.find(digest);
  if (it == entries_.end()) return std::nullopt;
  return it->second->height;
}

const Node::Entry* Node::ancestor_at(const Entry* entry, std::uint64_t height) const {
  while (entry && entry->height > height) entry = entry->parent;
  return entry && entry->height == height ? entry : nullptr;
}

bool Node::on_main_chain(const Digest& digest) const {
  auto it = entries_.find(digest);
  if (it == entries_.end()) return false;
  return ancestor_at(tip_, it->second->height) == it->second.get();
}

std::vector<Block> Node::main_chain() const { return tip_segment(tip_->height); }

std::vector<BlockHeader> Node::main_headers() const {
  std::vector<BlockHeader> out(tip_->height + 1);
  for (const Entry* e = tip_; e; e = e->parent) out[e->height] = e->block.header;
  return out;
}

std::vector<Block> Node::tip_segment(std::size_t depth) const {
  std::vector<Block> out;
  const Entry* e = tip_;
  for (std::size_t i = 0; e && i <= depth; ++i, e = e->parent) out.push_back(e->block);
  std::reverse(out.begin(), out.end());
  return out;
}

std::shared_ptr<const WorldState> Node::state_of(const Entry& entry) const {
  if (entry.state) return entry.state;
  std::vector<const Entry*> path;
  const Entry* e = &entry;
  for (; !e->state; e = e->parent) path.push_back(e);
  WorldState state = *e->state;
  for (auto it = path.rbegin(); it != path.rend(); ++it) apply_block_in_place(state, (*it)->block, params_, false);
  return std::make_shared<const WorldState>(std::move(state));
}

void Node::prune_snapshots() {
  if (tip_->height <= kSnapshotKeep) return;
  const Entry* old = ancestor_at(tip_, tip_->height - kSnapshotKeep);
  if (old && old->height % kSnapshotStride != 0) old->state.reset();
}

bool Node::connect(const Block& block, const Digest& digest, const Entry& parent) {
  auto height = parent.height + 1;
  if (auto reason = check_block(block, parent.block.header, params_.difficulty))
    throw ReplayError(ErrorCode::InvalidChain, height, std::nullopt, Status::fail(ErrorCode::InvalidChain, *reason));
  auto state = std::make_shared<const WorldState>(apply_block(*state_of(parent), block, params_, false));

  auto entry = std::make_unique<Entry>();
  entry->block = block;
  entry->digest = digest;
  entry->height = height;
  entry->parent = &parent;
  entry->state = std::move(state);
  const Entry& added = *entry;
  entries_.emplace(digest, std::move(entry));

  if (!preferred({added.height, added.digest}, tip())) return false;
  set_tip(added);
  return true;
}

void Node::set_tip(const Entry& entry) {
  const Entry* old = tip_;
  const Entry* fresh = &entry;
  std::vector<const Entry*> disconnected;
  while (old->height > fresh->height) {
    disconnected.push_back(old);
    old = old->parent;
  }
  while (fresh->height > old->height) fresh = fresh->parent;
  while (old != fresh) {
    disconnected.push_back(old);
    old = old->parent;
    fresh = fresh->parent;
  }

  std::vector<Transaction> returned;
  for (auto it = disconnected.rbegin(); it != disconnected.rend(); ++it)
    returned.insert(returned.end(), (*it)->block.transactions.begin(), (*it)->block.transactions.end());
  if (!disconnected.empty()) ++counters_.reorgs;

  tip_ = &entry;
  tip_state_ = state_of(entry);
  rebuild_mempool(std::move(returned));
  prune_snapshots();
}

void Node::rebuild_mempool(std::vector<Transaction> prefix) {
  std::deque<Transaction> candidates(std::make_move_iterator(prefix.begin()), std::make_move_iterator(prefix.end()));
  for (auto& tx : mempool_) candidates.push_back(std::move(tx));
  mempool_.clear();
  mempool_ids_.clear();
  pending_ = *tip_state_;
  auto now = admission_time();
  for (auto& tx : candidates) {
    auto id = tx.id();
    if (mempool_ids_.contains(id)) continue;
    if (!validate_transaction(pending_, tx, now, params_).ok()) continue;
    apply_transaction_in_place(pending_, tx, now, params_);
    mempool_ids_.insert(id);
    mempool_.push_back(std::move(tx));
  }
}

Status Node::submit(const Transaction& tx) {
  auto id = tx.id();
  if (mempool_ids_.contains(id)) return Status::fail(ErrorCode::DuplicateTransaction, "already in mempool");
  auto now = admission_time();
  auto status = validate_transaction(pending_, tx, now, params_);
  if (!status.ok()) return status;
  apply_transaction_in_place(pending_, tx, now, params_);
  mempool_ids_.insert(id);
  mempool_.push_back(tx);
  return status;
}

bool Node::add_block(const Block& block) {
  auto digest = block.hash();
  if (entries_.contains(digest)) return false;
  auto parent = entries_.find(block.header.prev_hash);
  if (parent == entries_.end()) throw Error(ErrorCode::NotChild, "unknown parent " + block.header.prev_hash.hex());
  auto before = tip();
  connect(block, digest, *parent->second);
  bool changed = false;
  connect_orphans(digest, changed);
  return tip() != before;
}

Block Node::mine(std::int64_t timestamp, std::size_t max_txs) {
  auto ts = std::max(timestamp, tip_->block.header.timestamp);
  WorldState scratch = *tip_state_;
  std::vector<Transaction> txs;
  for (const auto& tx : mempool_) {
    if (txs.size() >= max_txs) break;
    if (!validate_transaction(scratch, tx, ts, params_).ok()) continue;
    apply_transaction_in_place(scratch, tx, ts, params_);
    txs.push_back(tx);
  }
  auto block = mine_block(tip_->digest, std::move(txs), params_.difficulty, ts);
  connect(block, block.hash(), *tip_);
  return block;
}

Digest Node::missing_root(const Digest& orphan) const {
  Digest d = orphan;
  for (auto it = orphans_.find(d); it != orphans_.end(); it = orphans_.find(d)) d = it->second.header.prev_hash;
  return d;
}

void Node::connect_orphans(const Digest& parent, bool& tip_changed) {
  std::vector<Digest> work{parent};
  while (!work.empty()) {
    auto p = work.back();
    work.pop_back();
    auto [lo, hi] = orphans_by_parent_.equal_range(p);
    std::vector<Digest> children;
    for (auto it = lo; it != hi; ++it) children.push_back(it->second);
    orphans_by_parent_.erase(lo, hi);
    for (const auto& child : children) {
      auto node = orphans_.extract(child);
      if (node.empty()) continue;
      try {
        tip_changed |= connect(node.mapped(), child, *entries_.at(p));
        work.push_back(child);
      } catch (const Error&) {
        invalid_.insert(child);
        ++counters_.rejected_blocks;
      }
    }
  }
}

Node::Accept Node::accept(const Block& block, const Digest& digest, std::vector<Digest>* missing) {
  if (entries_.contains(digest)) return Accept::Known;
  if (invalid_.contains(digest)) return Accept::Invalid;
  auto parent = entries_.find(block.header.prev_hash);
  if (parent == entries_.end()) {
    if (!orphans_.contains(digest) && orphans_.size() < kMaxOrphans) {
      orphans_.emplace(digest, block);
      orphans_by_parent_.emplace(block.header.prev_hash, digest);
    }
    if (missing) missing->push_back(missing_root(block.header.prev_hash));
    return Accept::Orphaned;
  }
  try {
    connect(block, digest, *parent->second);
  } catch (const Error&) {
    invalid_.insert(digest);
    ++counters_.rejected_blocks;
    return Accept::Invalid;
  }
  bool changed = false;
  connect_orphans(digest, changed);
  return Accept::Connected;
}

std::vector<Envelope> Node::on_tx(const Transaction& tx) {
  auto id = tx.id();
  if (mempool_ids_.contains(id) || tip_state_->applied.contains(id)) return {};
  if (!submit(tx).ok()) {
    ++counters_.rejected_txs;
    return {};
  }
  return {{std::nullopt, tx_announce(tx)}};
}

std::vector<Envelope> Node::on_blocks(std::size_t from, std::span<const Block> blocks) {
  auto before = tip();
  std::vector<Digest> missing;
  for (const auto& block : blocks) accept(block, block.hash(), &missing);

  std::vector<Envelope> out;
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  std::erase_if(missing, [&](const Digest& d) { return entries_.contains(d) || invalid_.contains(d); });
  if (!missing.empty()) out.push_back({from, inventory_request(missing)});
  if (tip() != before) out.push_back({std::nullopt, block_announce(tip_->block)});
  return out;
}

std::vector<Envelope> Node::on_request(std::size_t from, std::span<const Digest> digests) {
  std::vector<const Entry*> found;
  std::set<Digest> seen;
  for (const auto& d : digests) {
    auto it = entries_.find(d);
    if (it == entries_.end()) continue;
    const Entry* e = it->second.get();
    for (std::size_t i = 0; e && i <= kInventoryDepth; ++i, e = e->parent)
      if (seen.insert(e->digest).second) found.push_back(e);
  }
  if (found.empty()) return {};
  std::sort(found.begin(), found.end(), [](const Entry* a, const Entry* b) { return a->height < b->height; });
  std::vector<Block> blocks;
  for (const auto* e : found) blocks.push_back(e->block);
  return {{from, inventory_response(blocks)}};
}

std::vector<Envelope> Node::handle_message(std::size_t from, ByteSpan bytes) {
  Message m;
  try {
    m = split(bytes);
  } catch (const Error&) {
    ++counters_.malformed;
    return {};
  }
  return handle_message(from, m);
}

std::vector<Envelope> Node::handle_message(std::size_t from, const Message& message) {
  Payload p;
  try {
    p = decode_payload(message.kind, message.payload);
  } catch (const Error&) {
    ++counters_.malformed;
    return {};
  }
  switch (p.kind) {
    case MessageKind::TxAnnounce: return on_tx(p.txs.front());
    case MessageKind::BlockAnnounce:
    case MessageKind::InventoryResponse: return on_blocks(from, p.blocks);
    case MessageKind::InventoryRequest: return on_request(from, p.digests);
  }
  return {};
}

}  // namespace agri

#include <gtest/gtest.h>

#include "agri/error.hpp"
#include "agri/network.hpp"
#include "support.hpp"

using namespace agri;

namespace {

ChainParams easy() {
  ChainParams p;
  p.difficulty = 4;
  return p;
}

Transaction register_tx(const std::string& label, std::uint64_t nonce = 0) {
  return make_transaction(tx::RegisterActor{Role::Farmer, label}, KeyPair::from_label(label), nonce);
}

const Envelope* find_kind(const std::vector<Envelope>& out, MessageKind kind) {
  for (const auto& e : out)
    if (e.message.kind == kind) return &e;
  return nullptr;
}

std::vector<Block> blocks_of(const Message& m) {
  Reader r(m.payload);
  std::vector<Block> out;
  auto n = r.count();
  for (std::size_t i = 0; i < n; ++i) out.push_back(decode_block(ByteSpan(r.bytes())));
  return out;
}

}  // namespace

TEST(ForkChoice, Examples) {
  auto a = test::label_digest("a"), b = test::label_digest("b"), c = test::label_digest("c");
  std::vector<ChainTip> tips{{5, a}, {7, b}, {6, c}};
  EXPECT_EQ(fork_choice(tips), (ChainTip{7, b}));

  auto lo = std::min(a, b), hi = std::max(a, b);
  std::vector<ChainTip> tied{{7, hi}, {7, lo}};
  EXPECT_EQ(fork_choice(tied), (ChainTip{7, lo}));
  EXPECT_EQ(fork_choice(tied), fork_choice(std::vector<ChainTip>{{7, lo}, {7, hi}}));

  std::vector<ChainTip> one{{3, c}};
  EXPECT_EQ(fork_choice(one), one[0]);
}

TEST(ForkChoice, NoCandidates) {
  try {
    fork_choice(std::vector<ChainTip>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCandidates);
  }
}

TEST(ForkChoice, PreferredIsStrictTotalOrder) {
  auto ids = test::label_digests(6);
  std::vector<ChainTip> tips;
  for (std::uint64_t h = 0; h < 3; ++h)
    for (const auto& d : ids) tips.push_back({h, d});
  for (const auto& x : tips) {
    EXPECT_FALSE(preferred(x, x));
    for (const auto& y : tips)
      if (!(x == y)) EXPECT_NE(preferred(x, y), preferred(y, x));
  }
}

TEST(Message, RoundTripAndValidation) {
  Node n(easy());
  auto t = register_tx("a");
  for (const auto& m : {tx_announce(t), block_announce(n.tip_block()),
                        inventory_request(std::vector<Digest>{n.genesis_digest()}),
                        inventory_response(std::vector<Block>{n.tip_block()})}) {
    EXPECT_EQ(decode_message(ByteSpan(encode_message(m))), m);
  }
  EXPECT_EQ(to_string(MessageKind::InventoryRequest), "InventoryRequest");

  auto bytes = encode_message(tx_announce(t));
  bytes[0] = 9;
  EXPECT_THROW(decode_message(ByteSpan(bytes)), Error);
  bytes = encode_message(tx_announce(t));
  bytes.pop_back();
  EXPECT_THROW(decode_message(ByteSpan(bytes)), Error);
  // A block payload under a transaction tag does not decode.
  Message wrong{MessageKind::TxAnnounce, block_announce(n.tip_block()).payload};
  EXPECT_THROW(decode_message(ByteSpan(encode_message(wrong))), Error);
}

TEST(Node, MalformedMessagesAreCountedNotFatal) {
  Node n(easy());
  Bytes junk{0xff, 1, 2, 3};
  EXPECT_TRUE(n.handle_message(1, junk).empty());
  EXPECT_TRUE(n.handle_message(1, Bytes{}).empty());
  EXPECT_TRUE(n.handle_message(1, Message{MessageKind::BlockAnnounce, {1, 2}}).empty());
  EXPECT_EQ(n.counters().malformed, 3u);
  EXPECT_EQ(n.tip().height, 0u);
}

TEST(Node, TxAnnounceAdmitsOnceAndRelays) {
  Node n(easy());
  auto t = register_tx("a");
  auto out = n.handle_message(1, tx_announce(t));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].to);
  EXPECT_EQ(out[0].message.kind, MessageKind::TxAnnounce);
  EXPECT_TRUE(n.in_mempool(t.id()));
  auto pending = n.pending_state();
  EXPECT_TRUE(n.handle_message(2, tx_announce(t)).empty());
  EXPECT_EQ(n.mempool().size(), 1u);
  EXPECT_EQ(n.pending_state(), pending);
  EXPECT_EQ(n.counters().rejected_txs, 0u);
}

TEST(Node, InvalidTxRejected) {
  Node n(easy());
  auto lot = make_transaction(tx::CreateLot{"c", "v", "w", 1, 0}, KeyPair::from_label("nobody"));
  EXPECT_TRUE(n.handle_message(1, tx_announce(lot)).empty());
  EXPECT_EQ(n.counters().rejected_txs, 1u);
  EXPECT_EQ(n.submit(lot).code, ErrorCode::UnknownSigner);
}

TEST(Node, MempoolValidatesAgainstPendingState) {
  Node n(easy());
  auto key = KeyPair::from_label("f");
  ASSERT_TRUE(n.submit(make_transaction(tx::RegisterActor{Role::Farmer, "f"}, key)).ok());
  // depends on the registration still waiting in the mempool
  EXPECT_TRUE(n.submit(make_transaction(tx::CreateLot{"c", "v", "w", 1, 0}, key, 1)).ok());
  EXPECT_EQ(n.submit(make_transaction(tx::RegisterActor{Role::Farmer, "f"}, key, 2)).code, ErrorCode::AlreadyRegistered);
}

TEST(Node, BlockExtendingTipAdvancesAndClearsMempool) {
  Node miner(easy()), peer(easy());
  auto t = register_tx("a");
  ASSERT_TRUE(miner.submit(t).ok());
  ASSERT_TRUE(peer.submit(t).ok());
  auto block = miner.mine(60);
  EXPECT_TRUE(miner.mempool().empty());
  auto out = peer.handle_message(0, block_announce(block));
  EXPECT_EQ(peer.tip().height, 1u);
  EXPECT_EQ(peer.tip().digest, block.hash());
  EXPECT_TRUE(peer.mempool().empty());
  ASSERT_NE(find_kind(out, MessageKind::BlockAnnounce), nullptr);
  // Known block: nothing to do.
  EXPECT_TRUE(peer.handle_message(0, block_announce(block)).empty());
}

TEST(Node, OrphanTriggersInventoryRequestThenAdoption) {
  Node a(easy()), b(easy());
  ASSERT_TRUE(a.submit(register_tx("x")).ok());
  auto b1 = a.mine(60);
  ASSERT_TRUE(a.submit(register_tx("y")).ok());
  auto b2 = a.mine(120);

  // b never saw b1.
  auto out = b.handle_message(0, block_announce(b2));
  EXPECT_EQ(b.tip().height, 0u);
  EXPECT_EQ(b.orphan_count(), 1u);
  const auto* req = find_kind(out, MessageKind::InventoryRequest);
  ASSERT_NE(req, nullptr);
  EXPECT_EQ(req->to, 0u);
  auto asked = decode_message(ByteSpan(encode_message(req->message)));
  Reader r(asked.payload);
  ASSERT_EQ(r.count(), 1u);
  EXPECT_EQ(r.digest(), b1.hash());

  auto reply = a.handle_message(1, req->message);
  ASSERT_EQ(reply.size(), 1u);
  EXPECT_EQ(reply[0].to, 1u);
  EXPECT_EQ(reply[0].message.kind, MessageKind::InventoryResponse);
  auto served = blocks_of(reply[0].message);
  ASSERT_EQ(served.size(), 2u);  // b1 and genesis, oldest first
  EXPECT_EQ(served[1], b1);

  b.handle_message(0, reply[0].message);
  EXPECT_EQ(b.tip().digest, b2.hash());
  EXPECT_EQ(b.orphan_count(), 0u);
  EXPECT_EQ(b.main_chain(), a.main_chain());
}

TEST(Node, LongerForkCausesReorgAndReturnsTransactions) {
  Node a(easy()), b(easy());
  auto shared = register_tx("shared");
  auto only_a = register_tx("only-a");
  ASSERT_TRUE(a.submit(shared).ok());
  ASSERT_TRUE(a.submit(only_a).ok());
  a.mine(60);
  ASSERT_EQ(a.mempool().size(), 0u);

  ASSERT_TRUE(b.submit(shared).ok());
  b.mine(60);
  b.mine(120);
  a.handle_message(1, inventory_response(b.tip_segment(10)));
  EXPECT_EQ(a.tip(), b.tip());
  EXPECT_EQ(a.counters().reorgs, 1u);
  // only-a was disconnected and is not on the new chain, so it waits again.
  ASSERT_EQ(a.mempool().size(), 1u);
  EXPECT_EQ(a.mempool().front().id(), only_a.id());
  EXPECT_FALSE(a.in_mempool(shared.id()));
}

TEST(Node, EqualHeightForkResolvedByDigest) {
  Node a(easy()), b(easy());
  ASSERT_TRUE(a.submit(register_tx("p")).ok());
  ASSERT_TRUE(b.submit(register_tx("q")).ok());
  auto ba = a.mine(60), bb = b.mine(60);
  a.handle_message(1, block_announce(bb));
  b.handle_message(0, block_announce(ba));
  EXPECT_EQ(a.tip(), b.tip());
  EXPECT_EQ(a.tip().digest, std::min(ba.hash(), bb.hash()));
}

TEST(Node, InvalidBlockRejectedAndRemembered) {
  Node a(easy()), b(easy());
  auto block = a.mine(60);
  block.header.timestamp += 1;  // breaks the proof of work with high probability
  while (meets_difficulty(block.hash(), 4)) ++block.header.nonce;
  b.handle_message(0, block_announce(block));
  EXPECT_EQ(b.tip().height, 0u);
  EXPECT_EQ(b.counters().rejected_blocks, 1u);
  b.handle_message(0, block_announce(block));
  EXPECT_EQ(b.counters().rejected_blocks, 1u);
}

TEST(Node, BlockWithInvalidTransactionRejected) {
  Node a(easy()), b(easy());
  auto lot = make_transaction(tx::CreateLot{"c", "v", "w", 1, 0}, KeyPair::from_label("ghost"));
  auto block = mine_block(a.genesis_digest(), {lot}, 4, 60);
  b.handle_message(0, block_announce(block));
  EXPECT_EQ(b.tip().height, 0u);
  EXPECT_EQ(b.counters().rejected_blocks, 1u);
  try {
    a.add_block(block);
    FAIL();
  } catch (const ReplayError&) {
  }
}

TEST(Node, AddBlockNeedsKnownParent) {
  Node a(easy());
  auto stray = mine_block(test::label_digest("elsewhere"), {}, 4, 60);
  try {
    a.add_block(stray);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotChild);
  }
}

TEST(Node, MineRespectsLimitAndTimestampFloor) {
  Node a(easy());
  for (int i = 0; i < 5; ++i) ASSERT_TRUE(a.submit(register_tx("m" + std::to_string(i))).ok());
  auto b1 = a.mine(600, 3);
  EXPECT_EQ(b1.transactions.size(), 3u);
  EXPECT_EQ(a.mempool().size(), 2u);
  auto b2 = a.mine(10);  // earlier than the tip: clamped
  EXPECT_EQ(b2.header.timestamp, 600);
  EXPECT_TRUE(a.mempool().empty());
}

TEST(Node, ChainQueries) {
  Node a(easy());
  std::vector<Digest> ids{a.genesis_digest()};
  for (int i = 1; i <= 5; ++i) ids.push_back(a.mine(60 * i).hash());
  EXPECT_EQ(a.tip().height, 5u);
  EXPECT_EQ(a.tip_segment(2).size(), 3u);
  EXPECT_EQ(a.tip_segment(2).front().hash(), ids[3]);
  EXPECT_EQ(a.tip_segment(100).size(), 6u);
  EXPECT_EQ(a.main_headers().size(), 6u);
  for (std::size_t h = 0; h < ids.size(); ++h) {
    EXPECT_EQ(a.height_of(ids[h]), h);
    EXPECT_TRUE(a.on_main_chain(ids[h]));
  }
  EXPECT_FALSE(a.on_main_chain(test::label_digest("x")));
  EXPECT_TRUE(validate_chain(a.main_chain(), a.genesis_digest()).ok());
}

TEST(Node, DeepChainStateSurvivesSnapshotPruning) {
  Node a(easy()), b(easy());
  for (int i = 1; i <= 200; ++i) {
    if (i % 10 == 0) ASSERT_TRUE(a.submit(register_tx("deep" + std::to_string(i))).ok());
    a.mine(60 * i);
  }
  for (std::size_t from = 0; from <= 200; from += 50) {
    auto chain = a.main_chain();
    std::vector<Block> part(chain.begin() + static_cast<std::ptrdiff_t>(from),
                            chain.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(from + 51, chain.size())));
    b.handle_message(0, inventory_response(part));
  }
  EXPECT_EQ(b.tip(), a.tip());
  EXPECT_EQ(state_digest(*b.tip_state()), state_digest(replay(a.main_chain(), easy())));
  // A fork from deep in history needs a pruned ancestor's state rebuilt.
  auto chain = a.main_chain();
  auto fork = mine_block(chain[30].hash(), {register_tx("late")}, 4, chain[30].header.timestamp + 1);
  a.add_block(fork);
  EXPECT_EQ(a.height_of(fork.hash()), 31u);
  EXPECT_FALSE(a.on_main_chain(fork.hash()));
}

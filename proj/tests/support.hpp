#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <type_traits>
#include <string>
#include <vector>

#include "agri/chainstate.hpp"
#include "agri/scenario.hpp"

namespace agri::test {

inline Digest label_digest(std::string_view label) { return sha256(label); }

inline std::vector<Digest> label_digests(std::size_t n, std::string_view prefix = "tx") {
  std::vector<Digest> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(sha256(std::string(prefix) + std::to_string(i)));
  return out;
}

inline Digest flip_bit(Digest d, std::size_t bit = 0) {
  d.bytes[bit / 8 % 32] ^= static_cast<std::uint8_t>(1u << (bit % 8));
  return d;
}

/// One actor per role on a cheap chain, plus shortcuts for the common flows.
struct Market {
  ChainBuilder b;
  KeyPair farmer, processor, processor2, distributor, retailer, consumer, negotiator;

  explicit Market(std::uint8_t difficulty = 4, std::int64_t spacing = 60)
      : b(params_with(difficulty), spacing),
        farmer(b.actor("farmer", Role::Farmer)),
        processor(b.actor("processor", Role::Processor)),
        processor2(b.actor("processor-2", Role::Processor)),
        distributor(b.actor("distributor", Role::Distributor)),
        retailer(b.actor("retailer", Role::Retailer)),
        consumer(b.actor("consumer", Role::Consumer)),
        negotiator(b.actor("negotiator", Role::Negotiator)) {
    b.seal();
  }

  static ChainParams params_with(std::uint8_t difficulty) {
    ChainParams p;
    p.difficulty = difficulty;
    return p;
  }

  const WorldState& state() const { return b.state(); }

  Digest harvest(std::int64_t grams = 1'000'000, const std::string& crop = "tomato") {
    return b.submit(tx::CreateLot{crop, "roma", "mild", grams, b.now() - 3600}, farmer);
  }

  Digest open_auction(const Digest& lot, const KeyPair& seller, std::int64_t reserve = 1'000, std::int64_t window = 600) {
    return b.submit(tx::OpenAuction{lot, reserve, b.now(), b.now() + window}, seller);
  }

  /// Opens, takes one bid from `buyer`, waits out the window and closes.
  Digest sell(const Digest& lot, const KeyPair& seller, const KeyPair& buyer, std::int64_t price = 5'000) {
    auto auction = open_auction(lot, seller, 1'000, 600);
    b.seal();
    b.submit(tx::PlaceBid{auction, price}, buyer);
    b.advance(600);
    b.submit(tx::CloseAuction{auction}, seller);
    b.seal();
    return auction;
  }

  Digest ship(const Digest& lot, const KeyPair& carrier, const KeyPair& recipient, std::int64_t price = 10'000,
              std::int64_t cold_max = 800) {
    return b.submit(tx::StartShipment{lot, recipient.actor_id(), "truck-1", cold_max, price}, carrier);
  }

  void temperatures(const Digest& shipment, const KeyPair& carrier, const std::vector<std::int64_t>& values,
                    std::int64_t start) {
    tx::RecordTelemetry t{shipment, {}, {}};
    for (std::size_t i = 0; i < values.size(); ++i)
      t.temperatures.push_back({shipment, Metric::Temperature, values[i], start + static_cast<std::int64_t>(i) * 60, "probe"});
    b.submit(std::move(t), carrier);
  }

  void confirm(const Digest& shipment, const KeyPair& recipient) {
    b.submit(tx::ConfirmDelivery{shipment}, recipient);
    b.seal();
  }

  /// Harvests, sells to `buyer` and delivers clean; returns the lot.
  Digest delivered_lot(const KeyPair& buyer, std::int64_t grams = 1'000'000) {
    auto lot = harvest(grams);
    sell(lot, farmer, buyer);
    auto shipment = ship(lot, farmer, buyer);
    b.seal();
    temperatures(shipment, farmer, {300, 350}, b.now() - 60);
    confirm(shipment, buyer);
    return lot;
  }
};

}  // namespace agri::test

namespace agri::test {

/// Arbitrary (not necessarily valid) transaction bodies for encoding properties.
class BodyGen {
 public:
  explicit BodyGen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t num() {
    switch (rng_() % 4) {
      case 0: return 0;
      case 1: return static_cast<std::int64_t>(rng_() % 1000);
      case 2: return -static_cast<std::int64_t>(rng_() % 100000);
      default: return static_cast<std::int64_t>(rng_());
    }
  }
  Digest digest() {
    Digest d;
    for (auto& b : d.bytes) b = static_cast<std::uint8_t>(rng_());
    return d;
  }
  std::string text() {
    std::string s(rng_() % 6, 'a');
    for (auto& c : s) c = static_cast<char>(' ' + rng_() % 95);
    return s;
  }
  SensorReading reading() {
    return {digest(), static_cast<Metric>(rng_() % 3), num(), num(), text()};
  }
  template <typename T, typename F>
  std::vector<T> list(F make) {
    std::vector<T> out(rng_() % 4);
    for (auto& x : out) x = make();
    return out;
  }

  TxBody body() { return body(static_cast<TxKind>(rng_() % kTxKindCount)); }

  TxBody body(TxKind kind) {
    switch (kind) {
      case TxKind::RegisterActor: return tx::RegisterActor{static_cast<Role>(rng_() % kRoleCount), text()};
      case TxKind::RecordSensorBatch: return tx::RecordSensorBatch{digest(), list<SensorReading>([&] { return reading(); })};
      case TxKind::CreateLot: return tx::CreateLot{text(), text(), text(), num(), num()};
      case TxKind::OpenAuction: return tx::OpenAuction{digest(), num(), num(), num()};
      case TxKind::PlaceBid: return tx::PlaceBid{digest(), num()};
      case TxKind::CloseAuction: return tx::CloseAuction{digest()};
      case TxKind::StartShipment: return tx::StartShipment{digest(), digest(), text(), num(), num()};
      case TxKind::RecordTelemetry:
        return tx::RecordTelemetry{digest(), list<Waypoint>([&] { return Waypoint{num(), num(), num()}; }),
                                   list<SensorReading>([&] { return reading(); })};
      case TxKind::ConfirmDelivery: return tx::ConfirmDelivery{digest()};
      case TxKind::ProcessLot:
        return tx::ProcessLot{list<Digest>([&] { return digest(); }),
                              list<tx::ProcessOutput>([&] { return tx::ProcessOutput{text(), num()}; }), num(), text()};
      case TxKind::QualityCheck: return tx::QualityCheck{digest(), rng_() % 2 == 0, text()};
      case TxKind::RaiseDispute: return tx::RaiseDispute{digest(), digest(), text()};
      case TxKind::ResolveDispute:
        return tx::ResolveDispute{digest(), static_cast<tx::Ruling>(rng_() % 2), text()};
    }
    return tx::CloseAuction{};
  }

  Transaction transaction() {
    Transaction t;
    t.body = body();
    for (auto& b : t.signer_key) b = static_cast<std::uint8_t>(rng_());
    t.nonce = rng_() % 3 == 0 ? 0 : rng_();
    for (auto& b : t.signature) b = static_cast<std::uint8_t>(rng_());
    return t;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace agri::test

namespace agri::test {

/// Random but valid supply-chain histories. Candidate transactions are drawn from
/// the current state and kept only if the chain accepts them.
class ScenarioGen {
 public:
  ScenarioGen(std::uint64_t seed, std::size_t max_txs, std::uint8_t difficulty = 2)
      : rng_(seed), max_txs_(max_txs), b_(Market::params_with(difficulty), 60) {
    keys_.push_back(b_.actor("gen/farmer-" + std::to_string(seed), Role::Farmer));
    keys_.push_back(b_.actor("gen/processor-" + std::to_string(seed), Role::Processor));
    keys_.push_back(b_.actor("gen/distributor-" + std::to_string(seed), Role::Distributor));
    keys_.push_back(b_.actor("gen/retailer-" + std::to_string(seed), Role::Retailer));
  }

  ChainBuilder& run() {
    for (int attempt = 0; attempt < 4000 && b_.tx_count() < max_txs_; ++attempt) {
      if (pick(6) == 0) {
        b_.advance(60 * static_cast<std::int64_t>(1 + pick(12)));
        continue;
      }
      if (auto t = candidate()) {
        try {
          b_.add(*t);
        } catch (const Error&) {
        }
      }
    }
    if (b_.staged() > 0) b_.seal();
    return b_;
  }

  const KeyPair& key(std::size_t i) const { return keys_.at(i); }

 private:
  std::uint64_t pick(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }

  template <typename Map>
  const typename Map::mapped_type* any_of(const Map& m) {
    if (m.empty()) return nullptr;
    auto it = m.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(pick(m.size())));
    return &it->second;
  }

  const KeyPair* key_of(const Digest& actor) const {
    for (const auto& k : keys_)
      if (k.actor_id() == actor) return &k;
    return nullptr;
  }

  const KeyPair& random_key() { return keys_[pick(keys_.size())]; }

  std::optional<Transaction> candidate() {
    const auto& s = b_.state();
    auto now = b_.now();
    switch (pick(10)) {
      case 0:
        return b_.sign(tx::CreateLot{"crop", "v", "w", 1'000 + static_cast<std::int64_t>(pick(9'000)), now - 600}, keys_[0]);
      case 1: {
        const auto* lot = any_of(s.lots);
        if (!lot || !key_of(lot->owner)) return std::nullopt;
        return b_.sign(tx::OpenAuction{lot->lot_id, static_cast<std::int64_t>(pick(100)), now, now + 600},
                       *key_of(lot->owner));
      }
      case 2: {
        const auto* a = any_of(s.auctions);
        if (!a) return std::nullopt;
        auto amount = (a->best_bid() ? a->best_bid()->amount : a->reserve_price) + static_cast<std::int64_t>(pick(50));
        return b_.sign(tx::PlaceBid{a->auction_id, amount}, random_key());
      }
      case 3: {
        const auto* a = any_of(s.auctions);
        if (!a || !key_of(a->seller)) return std::nullopt;
        return b_.sign(tx::CloseAuction{a->auction_id}, *key_of(a->seller));
      }
      case 4: {
        const auto* lot = any_of(s.lots);
        if (!lot) return std::nullopt;
        return b_.sign(tx::StartShipment{lot->lot_id, lot->owner, "van-" + std::to_string(pick(3)), 800,
                                         static_cast<std::int64_t>(pick(10'000))},
                       keys_[pick(3)]);
      }
      case 5: {
        const auto* sh = any_of(s.shipments);
        if (!sh || !key_of(sh->shipper)) return std::nullopt;
        tx::RecordTelemetry t{sh->shipment_id, {{1, 2, now}}, {}};
        auto start = sh->temperature_log.empty() ? now - 300 : sh->temperature_log.back().time;
        for (std::int64_t k = 0; k < 3; ++k)
          t.temperatures.push_back({sh->shipment_id, Metric::Temperature, 500 + static_cast<std::int64_t>(pick(400)),
                                    start + k * 60, "probe"});
        return b_.sign(std::move(t), *key_of(sh->shipper));
      }
      case 6: {
        const auto* sh = any_of(s.shipments);
        if (!sh || !key_of(sh->recipient)) return std::nullopt;
        return b_.sign(tx::ConfirmDelivery{sh->shipment_id}, *key_of(sh->recipient));
      }
      case 7: {
        std::vector<Digest> parents;
        std::int64_t input = 0;
        for (const auto& [id, lot] : s.lots) {
          if ((lot.status == LotStatus::Delivered || lot.status == LotStatus::Registered) &&
              lot.owner == keys_[1].actor_id() && parents.size() < 2) {
            parents.push_back(id);
            input += lot.quantity;
          }
        }
        if (parents.empty()) return std::nullopt;
        std::vector<tx::ProcessOutput> outs{{"juice", input / 2}};
        if (pick(2)) outs.push_back({"pulp", input / 4});
        return b_.sign(tx::ProcessLot{parents, outs, 7'000 + static_cast<std::int64_t>(pick(1'000)), "press"}, keys_[1]);
      }
      case 8: {
        const auto* lot = any_of(s.lots);
        if (!lot) return std::nullopt;
        return b_.sign(tx::QualityCheck{lot->lot_id, pick(3) != 0, "sample"}, keys_[2 + pick(2)]);
      }
      default: {
        const auto* lot = any_of(s.lots);
        if (!lot || !key_of(lot->owner)) return std::nullopt;
        auto last = s.readings.contains(lot->lot_id) ? s.readings.at(lot->lot_id).back().time : now - 900;
        return b_.sign(tx::RecordSensorBatch{lot->lot_id,
                                             {{lot->lot_id, Metric::Temperature, 300 + static_cast<std::int64_t>(pick(500)),
                                               last + 60, "field"},
                                              {lot->lot_id, Metric::Humidity, 8'000, last + 60, "field"}}},
                       *key_of(lot->owner));
      }
    }
  }

  std::mt19937_64 rng_;
  std::size_t max_txs_;
  ChainBuilder b_;
  std::vector<KeyPair> keys_;
};

}  // namespace agri::test

namespace agri::test {

/// Custody holders per lot, recomputed from raw block transactions by a
/// breadth-first search over ProcessLot parent links. Independent of WorldState.
inline std::map<Digest, std::vector<Digest>> custody_oracle(const std::vector<Block>& chain, const Digest& lot_id) {
  auto child_id = [](const Digest& tx_id, std::uint32_t i) {
    Bytes buf(tx_id.bytes.begin(), tx_id.bytes.end());
    for (int s = 24; s >= 0; s -= 8) buf.push_back(static_cast<std::uint8_t>(i >> s));
    return sha256(buf);
  };
  std::map<Digest, std::vector<Digest>> parents;
  for (const auto& block : chain)
    for (const auto& t : block.transactions)
      if (const auto* p = std::get_if<tx::ProcessLot>(&t.body))
        for (std::uint32_t i = 0; i < p->outputs.size(); ++i) parents[child_id(t.id(), i)] = p->parent_lots;

  std::set<Digest> lineage{lot_id};
  std::vector<Digest> frontier{lot_id};
  while (!frontier.empty()) {
    auto id = frontier.back();
    frontier.pop_back();
    for (const auto& p : parents[id])
      if (lineage.insert(p).second) frontier.push_back(p);
  }

  std::map<Digest, std::vector<Digest>> holders;
  std::map<Digest, Digest> auction_lot, shipment_lot, shipment_recipient, top_bidder;
  for (const auto& block : chain) {
    for (const auto& t : block.transactions) {
      auto id = t.id();
      std::visit(
          [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, tx::CreateLot>) {
              if (lineage.contains(id)) holders[id].push_back(t.signer());
            } else if constexpr (std::is_same_v<T, tx::ProcessLot>) {
              for (std::uint32_t i = 0; i < b.outputs.size(); ++i)
                if (lineage.contains(child_id(id, i))) holders[child_id(id, i)].push_back(t.signer());
            } else if constexpr (std::is_same_v<T, tx::OpenAuction>) {
              if (lineage.contains(b.lot_id)) auction_lot[id] = b.lot_id;
            } else if constexpr (std::is_same_v<T, tx::PlaceBid>) {
              if (auction_lot.contains(b.auction_id)) top_bidder[b.auction_id] = t.signer();
            } else if constexpr (std::is_same_v<T, tx::CloseAuction>) {
              if (auto it = top_bidder.find(b.auction_id); it != top_bidder.end())
                holders[auction_lot.at(b.auction_id)].push_back(it->second);
            } else if constexpr (std::is_same_v<T, tx::StartShipment>) {
              if (lineage.contains(b.lot_id)) {
                shipment_lot[id] = b.lot_id;
                shipment_recipient[id] = b.recipient;
              }
            } else if constexpr (std::is_same_v<T, tx::ConfirmDelivery>) {
              if (shipment_lot.contains(b.shipment_id))
                holders[shipment_lot.at(b.shipment_id)].push_back(shipment_recipient.at(b.shipment_id));
            }
          },
          t.body);
    }
  }
  return holders;
}

}  // namespace agri::test

#include "agri/render.hpp"
#include "agri/traceability.hpp"

namespace agri::test {

/// Every single-field corruption of every anchor: tx id, height, leaf, root, each
/// sibling and each side flip that actually changes the fold.
inline std::vector<TraceReport> anchor_mutations(const TraceReport& report, std::size_t header_count) {
  std::vector<TraceReport> out;
  for (std::size_t a = 0; a < report.anchors.size(); ++a) {
    auto mutate = [&](auto&& f) {
      auto copy = report;
      f(copy.anchors[a]);
      out.push_back(std::move(copy));
    };
    mutate([](Anchor& x) { x.tx_id = flip_bit(x.tx_id, 77); });
    mutate([&](Anchor& x) { x.block_height = (x.block_height + 1) % header_count; });
    mutate([](Anchor& x) { x.proof.leaf = flip_bit(x.proof.leaf, 3); });
    mutate([](Anchor& x) { x.proof.root = flip_bit(x.proof.root, 200); });
    const auto& proof = report.anchors[a].proof;
    auto acc = merkle_leaf_hash(proof.leaf);
    for (std::size_t s = 0; s < proof.path.size(); ++s) {
      mutate([&](Anchor& x) { x.proof.path[s].sibling = flip_bit(x.proof.path[s].sibling, 9); });
      // Swapping sides is a no-op when a node was paired with its own duplicate.
      if (proof.path[s].sibling != acc)
        mutate([&](Anchor& x) { x.proof.path[s].side = x.proof.path[s].side == Side::Left ? Side::Right : Side::Left; });
      const auto& st = proof.path[s];
      acc = st.side == Side::Left ? merkle_node_hash(st.sibling, acc) : merkle_node_hash(acc, st.sibling);
    }
  }
  return out;
}

/// The five consumer-facing groups: farm, vehicles, processing, storage temperatures, expiry.
inline bool has_field_groups(const Json& j) {
  return j.contains("origin") && j["origin"].is_array() && !j["origin"].empty() && j.contains("vehicles") &&
         j["vehicles"].is_array() && j.contains("processing") && j["processing"].is_array() &&
         j.contains("storage_conditions") && j["storage_conditions"].is_array() && j.contains("expiry_time");
}

inline std::vector<BlockHeader> headers_of(const std::vector<Block>& chain) {
  std::vector<BlockHeader> out;
  for (const auto& b : chain) out.push_back(b.header);
  return out;
}

}  // namespace agri::test

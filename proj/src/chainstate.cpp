#include "agri/chainstate.hpp"

#include <algorithm>
#include <array>

namespace agri {

const Actor* WorldState::actor(const Digest& id) const {
  auto it = actors.find(id);
  return it == actors.end() ? nullptr : &it->second;
}

const Lot* WorldState::lot(const Digest& id) const {
  auto it = lots.find(id);
  return it == lots.end() ? nullptr : &it->second;
}

std::string_view to_string(DisputeStatus s) { return s == DisputeStatus::Open ? "Open" : "Resolved"; }

namespace {

constexpr std::uint8_t bit(Role r) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(r)); }

constexpr std::uint8_t kAnyRole = 0x3f;
constexpr std::uint8_t kTraders = bit(Role::Farmer) | bit(Role::Processor) | bit(Role::Distributor) | bit(Role::Retailer);
constexpr std::uint8_t kCarriers = bit(Role::Farmer) | bit(Role::Processor) | bit(Role::Distributor);
constexpr std::uint8_t kBuyers = bit(Role::Processor) | bit(Role::Distributor) | bit(Role::Retailer);

// Indexed by TxKind.
constexpr std::array<std::uint8_t, kTxKindCount> kAuthorization = {
    kAnyRole,                                          // RegisterActor (self-signed)
    kTraders,                                          // RecordSensorBatch
    bit(Role::Farmer),                                 // CreateLot
    bit(Role::Farmer) | bit(Role::Processor),          // OpenAuction
    kBuyers,                                           // PlaceBid
    kTraders,                                          // CloseAuction
    kCarriers,                                         // StartShipment
    kCarriers,                                         // RecordTelemetry
    kBuyers,                                           // ConfirmDelivery
    bit(Role::Processor),                              // ProcessLot
    bit(Role::Distributor) | bit(Role::Retailer),      // QualityCheck
    kTraders | bit(Role::Consumer),                    // RaiseDispute
    bit(Role::Negotiator),                             // ResolveDispute
};

Status fail(ErrorCode code, std::string msg = {}) { return Status::fail(code, std::move(msg)); }

bool lot_is_live(LotStatus s) { return s != LotStatus::Processed && s != LotStatus::Retired; }

std::optional<std::int64_t> last_reading_time(const WorldState& state, const Digest& subject) {
  auto it = state.readings.find(subject);
  if (it == state.readings.end() || it->second.empty()) return std::nullopt;
  return it->second.back().time;
}

Status check_reading_sequence(const WorldState& state, const Digest& subject,
                              std::span<const SensorReading> readings) {
  auto last = last_reading_time(state, subject);
  for (const auto& r : readings) {
    if (r.subject != subject) return fail(ErrorCode::InvalidReading, "reading subject differs from batch subject");
    if (last && r.time < *last) return fail(ErrorCode::InvalidReading, "reading times must be non-decreasing");
    last = r.time;
  }
  return {};
}

struct Validator {
  const WorldState& state;
  const Transaction& tx;
  const Digest& signer;
  const Actor* actor;  // null only for RegisterActor
  std::int64_t now;

  Status operator()(const tx::RegisterActor&) const {
    if (actor) return fail(ErrorCode::AlreadyRegistered, signer.hex());
    return {};
  }

  Status operator()(const tx::RecordSensorBatch& b) const {
    if (b.readings.empty()) return fail(ErrorCode::InvalidReading, "empty batch");
    if (const auto* lot = state.lot(b.subject)) {
      if (lot->owner != signer) return fail(ErrorCode::NotOwner, "only the lot owner records lot sensors");
    } else if (auto it = state.shipments.find(b.subject); it != state.shipments.end()) {
      if (it->second.shipper != signer) return fail(ErrorCode::NotParticipant, "only the shipper records shipment sensors");
      if (it->second.delivered_time) return fail(ErrorCode::InvalidShipmentState, "shipment already delivered");
    } else {
      return fail(ErrorCode::UnknownLot, "subject is neither a lot nor a shipment");
    }
    return check_reading_sequence(state, b.subject, b.readings);
  }

  Status operator()(const tx::CreateLot& b) const {
    if (b.quantity <= 0) return fail(ErrorCode::InvalidQuantity, "quantity must be positive");
    return {};
  }

  Status operator()(const tx::OpenAuction& b) const {
    const auto* lot = state.lot(b.lot_id);
    if (!lot) return fail(ErrorCode::UnknownLot, b.lot_id.hex());
    if (lot->owner != signer) return fail(ErrorCode::NotOwner);
    if (lot->status != LotStatus::Registered) return fail(ErrorCode::InvalidLotState, "lot is not available for sale");
    if (b.close_time <= b.open_time) return fail(ErrorCode::InvalidAuctionWindow, "close_time must follow open_time");
    if (b.reserve_price < 0) return fail(ErrorCode::InvalidQuantity, "negative reserve price");
    return {};
  }

  Status operator()(const tx::PlaceBid& b) const {
    auto it = state.auctions.find(b.auction_id);
    if (it == state.auctions.end()) return fail(ErrorCode::UnknownAuction, b.auction_id.hex());
    const auto* lot = state.lot(it->second.lot_id);
    bool eligible = lot->is_raw() ? actor->role == Role::Processor
                                  : (actor->role == Role::Distributor || actor->role == Role::Retailer);
    if (!eligible) return fail(ErrorCode::RoleForbidden, "role may not bid on this lot type");
    try {
      place_bid(it->second, signer, b.amount, now);
    } catch (const Error& e) {
      return fail(e.code(), e.what());
    }
    return {};
  }

  Status operator()(const tx::CloseAuction& b) const {
    auto it = state.auctions.find(b.auction_id);
    if (it == state.auctions.end()) return fail(ErrorCode::UnknownAuction, b.auction_id.hex());
    const auto& auction = it->second;
    bool participant = auction.seller == signer ||
                       std::any_of(auction.bids.begin(), auction.bids.end(),
                                   [&](const Bid& bid) { return bid.bidder == signer; });
    if (!participant) return fail(ErrorCode::NotParticipant, "only the seller or a bidder may close");
    try {
      close_auction(auction, now);
    } catch (const Error& e) {
      return fail(e.code(), e.what());
    }
    return {};
  }

  Status operator()(const tx::StartShipment& b) const {
    const auto* lot = state.lot(b.lot_id);
    if (!lot) return fail(ErrorCode::UnknownLot, b.lot_id.hex());
    if (lot->status != LotStatus::Sold) return fail(ErrorCode::InvalidLotState, "only sold lots ship");
    if (lot->owner != b.recipient) return fail(ErrorCode::NotParticipant, "recipient must be the lot owner");
    if (b.contract_price < 0) return fail(ErrorCode::InvalidQuantity, "negative contract price");
    return {};
  }

  Status operator()(const tx::RecordTelemetry& b) const {
    auto it = state.shipments.find(b.shipment_id);
    if (it == state.shipments.end()) return fail(ErrorCode::UnknownShipment, b.shipment_id.hex());
    const auto& shipment = it->second;
    if (shipment.shipper != signer) return fail(ErrorCode::NotParticipant, "only the shipper reports telemetry");
    if (shipment.delivered_time) return fail(ErrorCode::InvalidShipmentState, "shipment already delivered");
    if (b.waypoints.empty() && b.temperatures.empty()) return fail(ErrorCode::InvalidReading, "empty telemetry");
    std::optional<std::int64_t> last;
    if (!shipment.waypoints.empty()) last = shipment.waypoints.back().time;
    for (const auto& p : b.waypoints) {
      if (last && p.time < *last) return fail(ErrorCode::InvalidReading, "waypoint times must be non-decreasing");
      last = p.time;
    }
    for (const auto& r : b.temperatures) {
      if (r.metric != Metric::Temperature) return fail(ErrorCode::WrongMetric, "telemetry carries temperatures only");
    }
    return check_reading_sequence(state, b.shipment_id, b.temperatures);
  }

  Status operator()(const tx::ConfirmDelivery& b) const {
    auto it = state.shipments.find(b.shipment_id);
    if (it == state.shipments.end()) return fail(ErrorCode::UnknownShipment, b.shipment_id.hex());
    if (it->second.recipient != signer) return fail(ErrorCode::NotParticipant, "only the recipient confirms");
    if (it->second.delivered_time) return fail(ErrorCode::InvalidShipmentState, "already delivered");
    return {};
  }

  Status operator()(const tx::ProcessLot& b) const {
    if (b.parent_lots.empty()) return fail(ErrorCode::InvalidQuantity, "processing needs at least one parent");
    if (b.outputs.empty()) return fail(ErrorCode::InvalidQuantity, "processing needs at least one output");
    std::set<Digest> seen;
    std::int64_t input = 0;
    for (const auto& id : b.parent_lots) {
      if (!seen.insert(id).second) return fail(ErrorCode::InvalidLotState, "duplicate parent lot");
      const auto* lot = state.lot(id);
      if (!lot) return fail(ErrorCode::UnknownLot, id.hex());
      if (lot->owner != signer) return fail(ErrorCode::NotOwner, "processor must own every parent");
      if (lot->status != LotStatus::Delivered && lot->status != LotStatus::Registered)
        return fail(ErrorCode::InvalidLotState, "parent must be in the processor's hands");
      input += lot->quantity;
    }
    std::int64_t output = 0;
    for (const auto& out : b.outputs) {
      if (out.quantity <= 0) return fail(ErrorCode::InvalidQuantity, "output quantity must be positive");
      output += out.quantity;
      if (output > input) return fail(ErrorCode::InvalidQuantity, "outputs exceed parent quantity");
    }
    return {};
  }

  Status operator()(const tx::QualityCheck& b) const {
    const auto* lot = state.lot(b.lot_id);
    if (!lot) return fail(ErrorCode::UnknownLot, b.lot_id.hex());
    if (lot->owner == signer) return fail(ErrorCode::NotParticipant, "owners cannot inspect their own lot");
    if (!lot_is_live(lot->status)) return fail(ErrorCode::InvalidLotState, "lot is no longer in circulation");
    return {};
  }

  Status operator()(const tx::RaiseDispute& b) const {
    if (!state.actor(b.respondent)) return fail(ErrorCode::UnknownActor, b.respondent.hex());
    if (b.respondent == signer) return fail(ErrorCode::NotParticipant, "cannot dispute against oneself");
    if (!state.lot(b.subject) && !state.shipments.contains(b.subject))
      return fail(ErrorCode::UnknownLot, "dispute subject is neither a lot nor a shipment");
    return {};
  }

  Status operator()(const tx::ResolveDispute& b) const {
    auto it = state.disputes.find(b.dispute_id);
    if (it == state.disputes.end()) return fail(ErrorCode::UnknownDispute, b.dispute_id.hex());
    if (it->second.status != DisputeStatus::Open) return fail(ErrorCode::DisputeClosed);
    if (it->second.respondent == signer) return fail(ErrorCode::NotParticipant, "negotiator is a party");
    return {};
  }
};

Status validate_impl(const WorldState& state, const Transaction& tx, std::int64_t now, bool check_signature) {
  auto tx_id = tx.id();
  if (check_signature && !verify_signature(tx.signer_key, tx_id.bytes, tx.signature))
    return fail(ErrorCode::BadSignature);
  if (state.applied.contains(tx_id)) return fail(ErrorCode::DuplicateTransaction, tx_id.hex());

  auto signer = tx.signer();
  const Actor* actor = state.actor(signer);
  Role role;
  if (tx.kind() == TxKind::RegisterActor) {
    role = std::get<tx::RegisterActor>(tx.body).role;
  } else {
    if (!actor) return fail(ErrorCode::UnknownSigner, signer.hex());
    role = actor->role;
  }
  if (!role_permits(tx.kind(), role))
    return fail(ErrorCode::RoleForbidden, std::string(to_string(role)) + " may not submit " + std::string(to_string(tx.kind())));

  return std::visit(Validator{state, tx, signer, actor, now}, tx.body);
}

void credit(WorldState& state, const Digest& who, std::int64_t delta) { state.balances[who] += delta; }

void score(WorldState& state, const TxEffect& effect, const ChainParams& params) {
  for (const auto& ev : outcome_of(effect)) {
    auto& s = state.reputations[ev.subject];
    s = update_score(s, ev, params.reputation_alpha_micro);
  }
}

struct Applier {
  WorldState& state;
  const Transaction& tx;
  const Digest& tx_id;
  const Digest& signer;
  std::int64_t now;
  const ChainParams& params;
  TxEffect& effect;

  void append_readings(const Digest& subject, std::span<const SensorReading> readings) {
    if (readings.empty()) return;
    auto& log = state.readings[subject];
    log.insert(log.end(), readings.begin(), readings.end());
    auto it = state.shipments.find(subject);
    if (it == state.shipments.end()) return;
    auto& shipment = it->second;
    for (const auto& r : readings) {
      if (r.metric == Metric::Temperature) shipment.temperature_log.push_back(r);
    }
    auto check = cold_chain_check(shipment.temperature_log, shipment.cold_chain_max);
    if (check.breached) {
      shipment.status = ShipmentStatus::Breached;
      shipment.first_breach = check.first_breach;
    }
  }

  void operator()(const tx::RegisterActor& b) {
    Actor a;
    a.actor_id = signer;
    a.role = b.role;
    a.display_name = b.display_name;
    a.public_key = tx.signer_key;
    a.registered_at = now;
    state.actors[signer] = a;
    state.reputations[signer] = ReputationScore{};
  }

  void operator()(const tx::RecordSensorBatch& b) { append_readings(b.subject, b.readings); }

  void operator()(const tx::CreateLot& b) {
    Lot lot;
    lot.lot_id = tx_id;
    lot.owner = signer;
    lot.origin_farm = signer;
    lot.crop_type = b.crop_type;
    lot.seed_variety = b.seed_variety;
    lot.sown_weather_summary = b.sown_weather_summary;
    lot.quantity = b.quantity;
    lot.harvest_time = b.harvest_time;
    lot.status = LotStatus::Registered;
    lot.origin_tx = tx_id;
    state.lots[tx_id] = std::move(lot);
  }

  void operator()(const tx::OpenAuction& b) {
    Auction a;
    a.auction_id = tx_id;
    a.lot_id = b.lot_id;
    a.seller = signer;
    a.reserve_price = b.reserve_price;
    a.open_time = b.open_time;
    a.close_time = b.close_time;
    state.auctions[tx_id] = std::move(a);
    state.lots[b.lot_id].status = LotStatus::InAuction;
  }

  void operator()(const tx::PlaceBid& b) {
    auto& auction = state.auctions[b.auction_id];
    auction = place_bid(std::move(auction), signer, b.amount, now);
  }

  void operator()(const tx::CloseAuction& b) {
    auto& auction = state.auctions[b.auction_id];
    auction = close_auction(std::move(auction), now);
    auto& lot = state.lots[auction.lot_id];
    if (auction.status == AuctionStatus::Closed) {
      lot.owner = auction.winner->bidder;
      lot.status = LotStatus::Sold;
      credit(state, auction.winner->bidder, -auction.winner->price);
      credit(state, auction.seller, auction.winner->price);
    } else {
      lot.status = LotStatus::Registered;
    }
  }

  void operator()(const tx::StartShipment& b) {
    Shipment s;
    s.shipment_id = tx_id;
    s.lot_id = b.lot_id;
    s.shipper = signer;
    s.recipient = b.recipient;
    s.vehicle_id = b.vehicle_id;
    s.cold_chain_max = b.cold_chain_max;
    s.contract_price = b.contract_price;
    s.start_time = now;
    state.shipments[tx_id] = std::move(s);
    state.lots[b.lot_id].status = LotStatus::InTransit;
  }

  void operator()(const tx::RecordTelemetry& b) {
    auto& shipment = state.shipments[b.shipment_id];
    shipment.waypoints.insert(shipment.waypoints.end(), b.waypoints.begin(), b.waypoints.end());
    append_readings(b.shipment_id, b.temperatures);
  }

  void operator()(const tx::ConfirmDelivery& b) {
    auto& shipment = state.shipments[b.shipment_id];
    shipment.delivered_time = now;
    if (shipment.status == ShipmentStatus::InTransit) shipment.status = ShipmentStatus::Delivered;
    auto settlement = settle_delivery(shipment, params.penalty_rate_micro);
    credit(state, settlement.payer, -settlement.net);
    credit(state, settlement.payee, settlement.net);
    state.settlements[b.shipment_id] = settlement;

    auto& lot = state.lots[shipment.lot_id];
    lot.owner = shipment.recipient;
    lot.status = LotStatus::Delivered;

    effect.shipper = shipment.shipper;
    effect.breached = shipment.status == ShipmentStatus::Breached;
  }

  void operator()(const tx::ProcessLot& b) {
    const auto& first = state.lots.at(b.parent_lots.front());
    std::int64_t harvest = first.harvest_time;
    for (const auto& id : b.parent_lots) {
      auto& parent = state.lots[id];
      harvest = std::min(harvest, parent.harvest_time);
      parent.status = LotStatus::Processed;
    }
    Lot base = state.lots.at(b.parent_lots.front());
    for (std::uint32_t i = 0; i < b.outputs.size(); ++i) {
      const auto& out = b.outputs[i];
      Lot child;
      child.lot_id = processed_lot_id(tx_id, i);
      child.owner = signer;
      child.origin_farm = base.origin_farm;
      child.crop_type = out.product_type;
      child.seed_variety = base.seed_variety;
      child.sown_weather_summary = base.sown_weather_summary;
      child.quantity = out.quantity;
      child.harvest_time = harvest;
      child.parent_lots = b.parent_lots;
      child.processing_temp = b.processing_temp;
      child.processed_time = now;
      child.expiry_time = now + params.shelf_life_of(out.product_type);
      child.processing_method = b.method;
      child.status = LotStatus::Registered;
      child.origin_tx = tx_id;
      state.lots[child.lot_id] = std::move(child);
    }
  }

  void operator()(const tx::QualityCheck& b) {
    auto& lot = state.lots[b.lot_id];
    state.quality[b.lot_id].push_back({signer, b.passed, now, b.notes, tx_id});
    effect.lot_owner = lot.owner;
    effect.quality_passed = b.passed;
    if (!b.passed && lot.status == LotStatus::Delivered) lot.status = LotStatus::Retired;
  }

  void operator()(const tx::RaiseDispute& b) {
    Dispute d;
    d.dispute_id = tx_id;
    d.subject = b.subject;
    d.raiser = signer;
    d.respondent = b.respondent;
    d.reason = b.reason;
    d.raised_at = now;
    state.disputes[tx_id] = std::move(d);
  }

  void operator()(const tx::ResolveDispute& b) {
    auto& d = state.disputes[b.dispute_id];
    d.status = DisputeStatus::Resolved;
    d.ruling = b.ruling;
    d.ruling_note = b.note;
    bool against_respondent = b.ruling == tx::Ruling::AgainstRespondent;
    effect.dispute_loser = against_respondent ? d.respondent : d.raiser;
    effect.dispute_winner = against_respondent ? d.raiser : d.respondent;
  }
};

}  // namespace

bool role_permits(TxKind kind, Role role) {
  return (kAuthorization.at(static_cast<std::size_t>(kind)) & bit(role)) != 0;
}

Digest processed_lot_id(const Digest& process_tx_id, std::uint32_t index) {
  Writer w;
  w.digest(process_tx_id);
  w.u32(index);
  return sha256(w.data());
}

Status validate_transaction(const WorldState& state, const Transaction& tx, std::int64_t block_time,
                            const ChainParams&) {
  return validate_impl(state, tx, block_time, true);
}

TxEffect apply_transaction_in_place(WorldState& state, const Transaction& tx, std::int64_t block_time,
                                    const ChainParams& params) {
  TxEffect effect;
  effect.kind = tx.kind();
  auto tx_id = tx.id();
  auto signer = tx.signer();
  std::visit(Applier{state, tx, tx_id, signer, block_time, params, effect}, tx.body);
  state.applied.insert(tx_id);
  score(state, effect, params);
  return effect;
}

WorldState apply_transaction(const WorldState& state, const Transaction& tx, std::int64_t block_time,
                             const ChainParams& params) {
  WorldState next = state;
  apply_transaction_in_place(next, tx, block_time, params);
  return next;
}

ReplayError::ReplayError(ErrorCode code, std::size_t block_index, std::optional<std::size_t> tx_index, Status cause)
    : Error(code, "block " + std::to_string(block_index) +
                      (tx_index ? ", tx " + std::to_string(*tx_index) : std::string()) + ": " +
                      std::string(to_string(cause.code)) + (cause.message.empty() ? "" : " (" + cause.message + ")")),
      block_index_(block_index),
      tx_index_(tx_index),
      cause_(std::move(cause)) {}

void apply_block_in_place(WorldState& state, const Block& block, const ChainParams& params, bool check_signatures) {
  const auto block_index = static_cast<std::size_t>(state.height);
  const auto now = block.header.timestamp;
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    const auto& tx = block.transactions[i];
    auto status = validate_impl(state, tx, now, check_signatures);
    if (!status.ok()) throw ReplayError(ErrorCode::InvalidTransaction, block_index, i, std::move(status));
    apply_transaction_in_place(state, tx, now, params);
  }
  state.height += 1;
  state.last_block_time = now;
}

WorldState apply_block(const WorldState& state, const Block& block, const ChainParams& params, bool check_signatures) {
  WorldState next = state;
  apply_block_in_place(next, block, params, check_signatures);
  return next;
}

WorldState replay(std::span<const Block> blocks, const ChainParams& params) {
  if (blocks.empty()) throw Error(ErrorCode::EmptyChain);
  auto check = validate_chain(blocks, make_genesis(params).hash());
  if (!check.ok())
    throw ReplayError(ErrorCode::InvalidChain, *check.first_invalid, std::nullopt,
                      Status::fail(ErrorCode::InvalidChain, check.reason));
  WorldState state;
  for (const auto& block : blocks) apply_block_in_place(state, block, params, false);
  return state;
}

namespace {

template <typename T>
void encode_opt(Writer& w, const std::optional<T>& v) {
  w.boolean(v.has_value());
  if (v) w.i64(static_cast<std::int64_t>(*v));
}

}  // namespace

Bytes encode_state(const WorldState& s) {
  Writer w;
  w.u64(s.height);
  w.i64(s.last_block_time);

  w.count(s.actors.size());
  for (const auto& [id, a] : s.actors) {
    w.digest(id);
    w.u8(static_cast<std::uint8_t>(a.role));
    w.str(a.display_name);
    w.bytes(a.public_key);
    w.i64(a.registered_at);
  }

  w.count(s.lots.size());
  for (const auto& [id, l] : s.lots) {
    w.digest(id);
    w.digest(l.owner);
    w.digest(l.origin_farm);
    w.str(l.crop_type);
    w.str(l.seed_variety);
    w.str(l.sown_weather_summary);
    w.i64(l.quantity);
    w.i64(l.harvest_time);
    w.count(l.parent_lots.size());
    for (const auto& p : l.parent_lots) w.digest(p);
    encode_opt(w, l.processing_temp);
    encode_opt(w, l.expiry_time);
    encode_opt(w, l.processed_time);
    w.str(l.processing_method);
    w.u8(static_cast<std::uint8_t>(l.status));
    w.digest(l.origin_tx);
  }

  w.count(s.auctions.size());
  for (const auto& [id, a] : s.auctions) encode(w, a);

  w.count(s.shipments.size());
  for (const auto& [id, sh] : s.shipments) encode(w, sh);

  w.count(s.disputes.size());
  for (const auto& [id, d] : s.disputes) {
    w.digest(id);
    w.digest(d.subject);
    w.digest(d.raiser);
    w.digest(d.respondent);
    w.str(d.reason);
    w.u8(static_cast<std::uint8_t>(d.status));
    encode_opt(w, d.ruling);
    w.str(d.ruling_note);
    w.i64(d.raised_at);
  }

  w.count(s.reputations.size());
  for (const auto& [id, r] : s.reputations) {
    w.digest(id);
    w.i64(r.micro);
  }

  w.count(s.readings.size());
  for (const auto& [id, list] : s.readings) {
    w.digest(id);
    w.count(list.size());
    for (const auto& r : list) encode(w, r);
  }

  w.count(s.quality.size());
  for (const auto& [id, list] : s.quality) {
    w.digest(id);
    w.count(list.size());
    for (const auto& q : list) {
      w.digest(q.inspector);
      w.boolean(q.passed);
      w.i64(q.time);
      w.str(q.notes);
      w.digest(q.tx_id);
    }
  }

  w.count(s.settlements.size());
  for (const auto& [id, st] : s.settlements) {
    w.digest(id);
    w.digest(st.payer);
    w.digest(st.payee);
    w.i64(st.gross);
    w.i64(st.penalty);
    w.i64(st.net);
  }

  w.count(s.balances.size());
  for (const auto& [id, b] : s.balances) {
    w.digest(id);
    w.i64(b);
  }

  w.count(s.applied.size());
  for (const auto& id : s.applied) w.digest(id);
  return w.take();
}

Digest state_digest(const WorldState& state) { return sha256(encode_state(state)); }

}  // namespace agri

#include "agri/render.hpp"

#include <algorithm>

namespace agri {

namespace {

constexpr std::string_view kGrams = "grams";
constexpr std::string_view kCentiCelsius = "centi_celsius";
constexpr std::string_view kMinorUnits = "minor_units";
constexpr std::string_view kMicroDegrees = "micro_degrees";

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw Error(ErrorCode::Malformed, std::string("missing field ") + name);
  return j.at(name);
}

template <typename T>
T get(const Json& j, const char* name) {
  try {
    return field(j, name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Malformed, std::string("field ") + name + ": " + e.what());
  }
}

template <typename T>
T get_or(const Json& j, const char* name, T fallback) {
  if (!j.is_object() || !j.contains(name) || j.at(name).is_null()) return fallback;
  return get<T>(j, name);
}

Digest digest_field(const Json& j, const char* name) { return Digest::from_hex(get<std::string>(j, name)); }

std::int64_t fixed_field(const Json& j, const char* name) { return parse_fixed(field(j, name)); }

template <std::size_t N>
std::array<std::uint8_t, N> hex_array(const Json& j, const char* name) {
  auto raw = from_hex(get<std::string>(j, name));
  if (raw.size() != N) throw Error(ErrorCode::Malformed, std::string(name) + " has wrong length");
  std::array<std::uint8_t, N> out;
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

Json opt(const std::optional<std::int64_t>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<std::int64_t> opt_field(const Json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return get<std::int64_t>(j, name);
}

Json opt_fixed(const std::optional<std::int64_t>& v, std::string_view unit) { return v ? fixed(*v, unit) : Json(nullptr); }

std::optional<std::int64_t> opt_fixed_field(const Json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return parse_fixed(j.at(name));
}

Json digests(const std::vector<Digest>& ds) {
  Json out = Json::array();
  for (const auto& d : ds) out.push_back(d.hex());
  return out;
}

std::vector<Digest> digests_from(const Json& j, const char* name) {
  std::vector<Digest> out;
  for (const auto& item : field(j, name)) out.push_back(Digest::from_hex(item.get<std::string>()));
  return out;
}

Role role_from(const Json& j, const char* name) {
  auto r = parse_role(get<std::string>(j, name));
  if (!r) throw Error(ErrorCode::Malformed, "unknown role");
  return *r;
}

Json waypoint_json(const Waypoint& p) {
  return {{"lat", fixed(p.lat_micro, kMicroDegrees)}, {"lon", fixed(p.lon_micro, kMicroDegrees)}, {"time", p.time}};
}

Waypoint waypoint_from(const Json& j) {
  return {fixed_field(j, "lat"), fixed_field(j, "lon"), get<std::int64_t>(j, "time")};
}

Json readings_json(const std::vector<SensorReading>& rs) {
  Json out = Json::array();
  for (const auto& r : rs) out.push_back(to_json(r));
  return out;
}

std::vector<SensorReading> readings_from(const Json& j, const char* name) {
  std::vector<SensorReading> out;
  for (const auto& item : field(j, name)) out.push_back(reading_from_json(item));
  return out;
}

struct BodyJson {
  Json operator()(const tx::RegisterActor& b) const {
    return {{"role", to_string(b.role)}, {"display_name", b.display_name}};
  }
  Json operator()(const tx::RecordSensorBatch& b) const {
    return {{"subject", b.subject.hex()}, {"readings", readings_json(b.readings)}};
  }
  Json operator()(const tx::CreateLot& b) const {
    return {{"crop_type", b.crop_type},
            {"seed_variety", b.seed_variety},
            {"sown_weather_summary", b.sown_weather_summary},
            {"quantity", fixed(b.quantity, kGrams)},
            {"harvest_time", b.harvest_time}};
  }
  Json operator()(const tx::OpenAuction& b) const {
    return {{"lot_id", b.lot_id.hex()},
            {"reserve_price", fixed(b.reserve_price, kMinorUnits)},
            {"open_time", b.open_time},
            {"close_time", b.close_time}};
  }
  Json operator()(const tx::PlaceBid& b) const {
    return {{"auction_id", b.auction_id.hex()}, {"amount", fixed(b.amount, kMinorUnits)}};
  }
  Json operator()(const tx::CloseAuction& b) const { return {{"auction_id", b.auction_id.hex()}}; }
  Json operator()(const tx::StartShipment& b) const {
    return {{"lot_id", b.lot_id.hex()},
            {"recipient", b.recipient.hex()},
            {"vehicle_id", b.vehicle_id},
            {"cold_chain_max", fixed(b.cold_chain_max, kCentiCelsius)},
            {"contract_price", fixed(b.contract_price, kMinorUnits)}};
  }
  Json operator()(const tx::RecordTelemetry& b) const {
    Json wps = Json::array();
    for (const auto& p : b.waypoints) wps.push_back(waypoint_json(p));
    return {{"shipment_id", b.shipment_id.hex()}, {"waypoints", wps}, {"temperatures", readings_json(b.temperatures)}};
  }
  Json operator()(const tx::ConfirmDelivery& b) const { return {{"shipment_id", b.shipment_id.hex()}}; }
  Json operator()(const tx::ProcessLot& b) const {
    Json outs = Json::array();
    for (const auto& o : b.outputs) outs.push_back({{"product_type", o.product_type}, {"quantity", fixed(o.quantity, kGrams)}});
    return {{"parent_lots", digests(b.parent_lots)},
            {"outputs", outs},
            {"processing_temp", fixed(b.processing_temp, kCentiCelsius)},
            {"method", b.method}};
  }
  Json operator()(const tx::QualityCheck& b) const {
    return {{"lot_id", b.lot_id.hex()}, {"passed", b.passed}, {"notes", b.notes}};
  }
  Json operator()(const tx::RaiseDispute& b) const {
    return {{"subject", b.subject.hex()}, {"respondent", b.respondent.hex()}, {"reason", b.reason}};
  }
  Json operator()(const tx::ResolveDispute& b) const {
    return {{"dispute_id", b.dispute_id.hex()}, {"ruling", to_string(b.ruling)}, {"note", b.note}};
  }
};

}  // namespace

Json fixed(std::int64_t value, std::string_view unit) { return {{"value", value}, {"unit", unit}}; }

std::int64_t parse_fixed(const Json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  return get<std::int64_t>(j, "value");
}

Json to_json(const SensorReading& r) {
  return {{"subject", r.subject.hex()}, {"metric", to_string(r.metric)}, {"value", r.value},
          {"unit", unit_of(r.metric)},   {"time", r.time},                {"device_id", r.device_id}};
}

SensorReading reading_from_json(const Json& j) {
  SensorReading r;
  r.subject = digest_field(j, "subject");
  auto metric = parse_metric(get<std::string>(j, "metric"));
  if (!metric) throw Error(ErrorCode::Malformed, "unknown metric");
  r.metric = *metric;
  r.value = fixed_field(j, "value");
  r.time = get<std::int64_t>(j, "time");
  r.device_id = get_or<std::string>(j, "device_id", "");
  return r;
}

Json to_json(const Transaction& t) {
  return {{"tx_id", t.id().hex()},
          {"kind", to_string(t.kind())},
          {"signer", t.signer().hex()},
          {"signer_key", to_hex(t.signer_key)},
          {"nonce", t.nonce},
          {"signature", to_hex(t.signature)},
          {"body", std::visit(BodyJson{}, t.body)}};
}

TxBody body_from_json(TxKind kind, const Json& j) {
  switch (kind) {
    case TxKind::RegisterActor: return tx::RegisterActor{role_from(j, "role"), get<std::string>(j, "display_name")};
    case TxKind::RecordSensorBatch:
      return tx::RecordSensorBatch{digest_field(j, "subject"), readings_from(j, "readings")};
    case TxKind::CreateLot:
      return tx::CreateLot{get<std::string>(j, "crop_type"), get_or<std::string>(j, "seed_variety", ""),
                           get_or<std::string>(j, "sown_weather_summary", ""), fixed_field(j, "quantity"),
                           get<std::int64_t>(j, "harvest_time")};
    case TxKind::OpenAuction:
      return tx::OpenAuction{digest_field(j, "lot_id"), fixed_field(j, "reserve_price"), get<std::int64_t>(j, "open_time"),
                             get<std::int64_t>(j, "close_time")};
    case TxKind::PlaceBid: return tx::PlaceBid{digest_field(j, "auction_id"), fixed_field(j, "amount")};
    case TxKind::CloseAuction: return tx::CloseAuction{digest_field(j, "auction_id")};
    case TxKind::StartShipment:
      return tx::StartShipment{digest_field(j, "lot_id"), digest_field(j, "recipient"), get<std::string>(j, "vehicle_id"),
                               fixed_field(j, "cold_chain_max"), fixed_field(j, "contract_price")};
    case TxKind::RecordTelemetry: {
      tx::RecordTelemetry b;
      b.shipment_id = digest_field(j, "shipment_id");
      if (j.contains("waypoints"))
        for (const auto& p : j.at("waypoints")) b.waypoints.push_back(waypoint_from(p));
      if (j.contains("temperatures")) b.temperatures = readings_from(j, "temperatures");
      return b;
    }
    case TxKind::ConfirmDelivery: return tx::ConfirmDelivery{digest_field(j, "shipment_id")};
    case TxKind::ProcessLot: {
      tx::ProcessLot b;
      b.parent_lots = digests_from(j, "parent_lots");
      for (const auto& o : field(j, "outputs"))
        b.outputs.push_back({get<std::string>(o, "product_type"), fixed_field(o, "quantity")});
      b.processing_temp = fixed_field(j, "processing_temp");
      b.method = get_or<std::string>(j, "method", "");
      return b;
    }
    case TxKind::QualityCheck:
      return tx::QualityCheck{digest_field(j, "lot_id"), get<bool>(j, "passed"), get_or<std::string>(j, "notes", "")};
    case TxKind::RaiseDispute:
      return tx::RaiseDispute{digest_field(j, "subject"), digest_field(j, "respondent"), get_or<std::string>(j, "reason", "")};
    case TxKind::ResolveDispute: {
      auto ruling = get<std::string>(j, "ruling");
      if (ruling != "AgainstRespondent" && ruling != "AgainstRaiser") throw Error(ErrorCode::Malformed, "unknown ruling");
      return tx::ResolveDispute{digest_field(j, "dispute_id"),
                                ruling == "AgainstRespondent" ? tx::Ruling::AgainstRespondent : tx::Ruling::AgainstRaiser,
                                get_or<std::string>(j, "note", "")};
    }
  }
  throw Error(ErrorCode::Malformed, "unknown kind");
}

Transaction transaction_from_json(const Json& j) {
  auto kind = parse_tx_kind(get<std::string>(j, "kind"));
  if (!kind) throw Error(ErrorCode::Malformed, "unknown transaction kind");
  Transaction t;
  t.body = body_from_json(*kind, field(j, "body"));
  t.signer_key = hex_array<32>(j, "signer_key");
  t.nonce = get_or<std::uint64_t>(j, "nonce", 0);
  t.signature = hex_array<64>(j, "signature");
  return t;
}

Json to_json(const BlockHeader& h) {
  return {{"version", h.version},       {"prev_hash", h.prev_hash.hex()}, {"merkle_root", h.merkle_root.hex()},
          {"timestamp", h.timestamp},   {"difficulty", h.difficulty},     {"nonce", h.nonce},
          {"tx_count", h.tx_count}};
}

BlockHeader header_from_json(const Json& j) {
  BlockHeader h;
  h.version = get<std::uint32_t>(j, "version");
  h.prev_hash = digest_field(j, "prev_hash");
  h.merkle_root = digest_field(j, "merkle_root");
  h.timestamp = get<std::int64_t>(j, "timestamp");
  h.difficulty = get<std::uint8_t>(j, "difficulty");
  h.nonce = get<std::uint64_t>(j, "nonce");
  h.tx_count = get<std::uint32_t>(j, "tx_count");
  return h;
}

Json to_json(const Block& b) {
  Json txs = Json::array();
  for (const auto& t : b.transactions) txs.push_back(to_json(t));
  return {{"hash", b.hash().hex()}, {"header", to_json(b.header)}, {"transactions", txs}};
}

Json to_json(const MerkleProof& p) {
  Json path = Json::array();
  for (const auto& s : p.path) path.push_back({{"sibling", s.sibling.hex()}, {"side", s.side == Side::Left ? "left" : "right"}});
  return {{"leaf", p.leaf.hex()}, {"path", path}, {"root", p.root.hex()}};
}

MerkleProof proof_from_json(const Json& j) {
  MerkleProof p;
  p.leaf = digest_field(j, "leaf");
  p.root = digest_field(j, "root");
  for (const auto& s : field(j, "path")) {
    auto side = get<std::string>(s, "side");
    if (side != "left" && side != "right") throw Error(ErrorCode::Malformed, "proof side must be left or right");
    p.path.push_back({digest_field(s, "sibling"), side == "left" ? Side::Left : Side::Right});
  }
  return p;
}

Json to_json(const Lot& lot) {
  return {{"lot_id", lot.lot_id.hex()},
          {"owner", lot.owner.hex()},
          {"origin_farm", lot.origin_farm.hex()},
          {"crop_type", lot.crop_type},
          {"seed_variety", lot.seed_variety},
          {"sown_weather_summary", lot.sown_weather_summary},
          {"quantity", fixed(lot.quantity, kGrams)},
          {"harvest_time", lot.harvest_time},
          {"parent_lots", digests(lot.parent_lots)},
          {"processing_temp", opt_fixed(lot.processing_temp, kCentiCelsius)},
          {"processing_method", lot.processing_method},
          {"processed_time", opt(lot.processed_time)},
          {"expiry_time", opt(lot.expiry_time)},
          {"status", to_string(lot.status)},
          {"origin_tx", lot.origin_tx.hex()}};
}

Json to_json(const Auction& a) {
  Json bids = Json::array();
  for (const auto& b : a.bids)
    bids.push_back({{"bidder", b.bidder.hex()}, {"amount", fixed(b.amount, kMinorUnits)}, {"time", b.time}});
  Json winner = nullptr;
  if (a.winner) winner = {{"bidder", a.winner->bidder.hex()}, {"price", fixed(a.winner->price, kMinorUnits)}};
  Json best = nullptr;
  if (const auto* b = a.best_bid()) best = {{"bidder", b->bidder.hex()}, {"amount", fixed(b->amount, kMinorUnits)}};
  return {{"auction_id", a.auction_id.hex()},
          {"lot_id", a.lot_id.hex()},
          {"seller", a.seller.hex()},
          {"reserve_price", fixed(a.reserve_price, kMinorUnits)},
          {"open_time", a.open_time},
          {"close_time", a.close_time},
          {"bids", bids},
          {"best_bid", best},
          {"status", to_string(a.status)},
          {"winner", winner}};
}

Json to_json(const Shipment& s, const Settlement* settlement) {
  Json wps = Json::array();
  for (const auto& p : s.waypoints) wps.push_back(waypoint_json(p));
  Json settle = nullptr;
  if (settlement) {
    settle = {{"payer", settlement->payer.hex()},
              {"payee", settlement->payee.hex()},
              {"gross", fixed(settlement->gross, kMinorUnits)},
              {"penalty", fixed(settlement->penalty, kMinorUnits)},
              {"net", fixed(settlement->net, kMinorUnits)}};
  }
  return {{"shipment_id", s.shipment_id.hex()},
          {"lot_id", s.lot_id.hex()},
          {"shipper", s.shipper.hex()},
          {"recipient", s.recipient.hex()},
          {"vehicle_id", s.vehicle_id},
          {"cold_chain_max", fixed(s.cold_chain_max, kCentiCelsius)},
          {"waypoints", wps},
          {"temperature_log", readings_json(s.temperature_log)},
          {"status", to_string(s.status)},
          {"contract_price", fixed(s.contract_price, kMinorUnits)},
          {"start_time", s.start_time},
          {"delivered_time", opt(s.delivered_time)},
          {"first_breach", opt(s.first_breach)},
          {"settlement", settle}};
}

Json to_json(const Dispute& d) {
  Json ruling = nullptr;
  if (d.ruling) ruling = to_string(*d.ruling);
  return {{"dispute_id", d.dispute_id.hex()}, {"subject", d.subject.hex()},   {"raiser", d.raiser.hex()},
          {"respondent", d.respondent.hex()}, {"reason", d.reason},           {"status", to_string(d.status)},
          {"ruling", ruling},                 {"ruling_note", d.ruling_note}, {"raised_at", d.raised_at}};
}

Json actor_json(const WorldState& state, const Actor& a) {
  ReputationScore score;
  if (auto it = state.reputations.find(a.actor_id); it != state.reputations.end()) score = it->second;
  std::int64_t balance = 0;
  if (auto it = state.balances.find(a.actor_id); it != state.balances.end()) balance = it->second;
  return {{"actor_id", a.actor_id.hex()},
          {"role", to_string(a.role)},
          {"display_name", a.display_name},
          {"public_key", to_hex(a.public_key)},
          {"registered_at", a.registered_at},
          {"reputation", render_score(score)},
          {"balance", fixed(balance, kMinorUnits)}};
}

Json to_json(const TraceReport& r) {
  Json origin = Json::array();
  for (const auto& o : r.origins) {
    origin.push_back({{"lot_id", o.lot_id.hex()},
                      {"farmer", o.farmer.hex()},
                      {"farmer_name", o.farmer_name},
                      {"crop_type", o.crop_type},
                      {"seed_variety", o.seed_variety},
                      {"sown_weather_summary", o.sown_weather_summary},
                      {"harvest_time", o.harvest_time},
                      {"quantity", fixed(o.quantity, kGrams)},
                      {"tx_id", o.tx_id.hex()}});
  }
  Json custody = Json::array();
  for (const auto& c : r.custody) {
    custody.push_back({{"lot_id", c.lot_id.hex()},
                       {"holder", c.holder.hex()},
                       {"from_time", c.from_time},
                       {"to_time", opt(c.to_time)},
                       {"acquired_via", to_string(c.acquired_via)},
                       {"tx_id", c.tx_id.hex()}});
  }
  Json processing = Json::array();
  for (const auto& p : r.processing) {
    processing.push_back({{"lot_id", p.lot_id.hex()},
                          {"processor", p.processor.hex()},
                          {"inputs", digests(p.inputs)},
                          {"processing_temp", fixed(p.processing_temp, kCentiCelsius)},
                          {"time", p.time},
                          {"expiry_time", opt(p.expiry_time)},
                          {"method", p.method},
                          {"tx_id", p.tx_id.hex()}});
  }
  Json storage = Json::array();
  for (const auto& s : r.storage_conditions) {
    storage.push_back({{"lot_id", s.lot_id.hex()},
                       {"holder", s.holder.hex()},
                       {"from_time", s.from_time},
                       {"to_time", opt(s.to_time)},
                       {"samples", s.samples},
                       {"min", opt_fixed(s.min, kCentiCelsius)},
                       {"max", opt_fixed(s.max, kCentiCelsius)},
                       {"mean", opt_fixed(s.mean, kCentiCelsius)}});
  }
  Json shipments = Json::array();
  for (const auto& s : r.shipments) {
    shipments.push_back({{"shipment_id", s.shipment_id.hex()},
                         {"lot_id", s.lot_id.hex()},
                         {"vehicle_id", s.vehicle_id},
                         {"shipper", s.shipper.hex()},
                         {"recipient", s.recipient.hex()},
                         {"cold_chain_max", fixed(s.cold_chain_max, kCentiCelsius)},
                         {"status", to_string(s.status)},
                         {"first_breach", opt(s.first_breach)},
                         {"tx_id", s.tx_id.hex()}});
  }
  Json quality = Json::array();
  for (const auto& q : r.quality_checks) {
    quality.push_back({{"inspector", q.inspector.hex()},
                       {"passed", q.passed},
                       {"time", q.time},
                       {"notes", q.notes},
                       {"tx_id", q.tx_id.hex()}});
  }
  Json anchors = Json::array();
  for (const auto& a : r.anchors) {
    anchors.push_back({{"tx_id", a.tx_id.hex()}, {"block_height", a.block_height}, {"proof", to_json(a.proof)}});
  }
  return {{"lot_id", r.lot_id.hex()},
          {"origin", origin},
          {"custody", custody},
          {"processing", processing},
          {"storage_conditions", storage},
          {"vehicles", r.vehicles},
          {"shipments", shipments},
          {"quality_checks", quality},
          {"expiry_time", opt(r.expiry_time)},
          {"anchors", anchors}};
}

TraceReport trace_report_from_json(const Json& j) {
  TraceReport r;
  r.lot_id = digest_field(j, "lot_id");
  for (const auto& o : field(j, "origin")) {
    r.origins.push_back({digest_field(o, "lot_id"), digest_field(o, "farmer"), get_or<std::string>(o, "farmer_name", ""),
                         get<std::string>(o, "crop_type"), get_or<std::string>(o, "seed_variety", ""),
                         get_or<std::string>(o, "sown_weather_summary", ""), get<std::int64_t>(o, "harvest_time"),
                         fixed_field(o, "quantity"), digest_field(o, "tx_id")});
  }
  for (const auto& c : field(j, "custody")) {
    CustodyEntry e;
    e.lot_id = digest_field(c, "lot_id");
    e.holder = digest_field(c, "holder");
    e.from_time = get<std::int64_t>(c, "from_time");
    e.to_time = opt_field(c, "to_time");
    auto via = get<std::string>(c, "acquired_via");
    if (via == "Harvest") e.acquired_via = CustodyVia::Harvest;
    else if (via == "AuctionAward") e.acquired_via = CustodyVia::AuctionAward;
    else if (via == "Delivery") e.acquired_via = CustodyVia::Delivery;
    else if (via == "Processing") e.acquired_via = CustodyVia::Processing;
    else throw Error(ErrorCode::Malformed, "unknown custody mechanism");
    e.tx_id = digest_field(c, "tx_id");
    r.custody.push_back(e);
  }
  for (const auto& p : field(j, "processing")) {
    r.processing.push_back({digest_field(p, "lot_id"), digest_field(p, "processor"), digests_from(p, "inputs"),
                            fixed_field(p, "processing_temp"), get<std::int64_t>(p, "time"), opt_field(p, "expiry_time"),
                            get_or<std::string>(p, "method", ""), digest_field(p, "tx_id")});
  }
  for (const auto& s : field(j, "storage_conditions")) {
    r.storage_conditions.push_back({digest_field(s, "lot_id"), digest_field(s, "holder"), get<std::int64_t>(s, "from_time"),
                                    opt_field(s, "to_time"), get<std::size_t>(s, "samples"), opt_fixed_field(s, "min"),
                                    opt_fixed_field(s, "max"), opt_fixed_field(s, "mean")});
  }
  r.vehicles = get<std::vector<std::string>>(j, "vehicles");
  for (const auto& s : field(j, "shipments")) {
    ShipmentRecord rec;
    rec.shipment_id = digest_field(s, "shipment_id");
    rec.lot_id = digest_field(s, "lot_id");
    rec.vehicle_id = get<std::string>(s, "vehicle_id");
    rec.shipper = digest_field(s, "shipper");
    rec.recipient = digest_field(s, "recipient");
    rec.cold_chain_max = fixed_field(s, "cold_chain_max");
    auto status = get<std::string>(s, "status");
    rec.status = status == "Delivered" ? ShipmentStatus::Delivered
                 : status == "Breached" ? ShipmentStatus::Breached
                                        : ShipmentStatus::InTransit;
    rec.first_breach = opt_field(s, "first_breach");
    rec.tx_id = digest_field(s, "tx_id");
    r.shipments.push_back(rec);
  }
  for (const auto& q : field(j, "quality_checks")) {
    r.quality_checks.push_back({digest_field(q, "inspector"), get<bool>(q, "passed"), get<std::int64_t>(q, "time"),
                                get_or<std::string>(q, "notes", ""), digest_field(q, "tx_id")});
  }
  r.expiry_time = opt_field(j, "expiry_time");
  for (const auto& a : field(j, "anchors")) {
    r.anchors.push_back({digest_field(a, "tx_id"), get<std::uint64_t>(a, "block_height"), proof_from_json(field(a, "proof"))});
  }
  return r;
}

Json to_json(const FeedConfig& c) {
  Json profiles = Json::array();
  for (const auto& p : c.profiles) {
    profiles.push_back({{"metric", to_string(p.metric)},
                        {"base", p.base},
                        {"amplitude", p.amplitude},
                        {"period", p.period},
                        {"jitter", p.jitter}});
  }
  return {{"seed", c.seed},
          {"subject", c.subject.hex()},
          {"profiles", profiles},
          {"sample_interval", c.sample_interval},
          {"duration", c.duration},
          {"start_time", c.start_time},
          {"device_id", c.device_id},
          {"breach_at", opt(c.breach_at)},
          {"breach_spike", c.breach_spike}};
}

FeedConfig feed_config_from_json(const Json& j) {
  FeedConfig c;
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  c.subject = digest_field(j, "subject");
  for (const auto& p : field(j, "profiles")) {
    MetricProfile m;
    auto metric = parse_metric(get<std::string>(p, "metric"));
    if (!metric) throw Error(ErrorCode::Malformed, "unknown metric");
    m.metric = *metric;
    m.base = fixed_field(p, "base");
    m.amplitude = p.contains("amplitude") ? fixed_field(p, "amplitude") : 0;
    m.period = get_or<std::int64_t>(p, "period", 86'400);
    m.jitter = p.contains("jitter") ? fixed_field(p, "jitter") : 0;
    c.profiles.push_back(m);
  }
  c.sample_interval = get<std::int64_t>(j, "sample_interval");
  c.duration = get<std::int64_t>(j, "duration");
  c.start_time = get_or<std::int64_t>(j, "start_time", 0);
  c.device_id = get_or<std::string>(j, "device_id", "sensor-0");
  c.breach_at = opt_field(j, "breach_at");
  c.breach_spike = get_or<std::int64_t>(j, "breach_spike", 500);
  return c;
}

ChainParams params_from_json(const Json& j) {
  ChainParams p;
  p.difficulty = get_or<std::uint8_t>(j, "difficulty", p.difficulty);
  p.genesis_timestamp = get_or<std::int64_t>(j, "genesis_timestamp", p.genesis_timestamp);
  p.penalty_rate_micro = get_or<std::int64_t>(j, "penalty_rate_micro", p.penalty_rate_micro);
  p.reputation_alpha_micro = get_or<std::int64_t>(j, "reputation_alpha_micro", p.reputation_alpha_micro);
  p.default_shelf_life = get_or<std::int64_t>(j, "default_shelf_life", p.default_shelf_life);
  if (j.contains("shelf_life")) {
    for (const auto& [product, seconds] : j.at("shelf_life").items()) p.shelf_life[product] = seconds.get<std::int64_t>();
  }
  return p;
}

Json to_json(const ChainParams& p) {
  return {{"difficulty", p.difficulty},
          {"genesis_timestamp", p.genesis_timestamp},
          {"penalty_rate_micro", p.penalty_rate_micro},
          {"reputation_alpha_micro", p.reputation_alpha_micro},
          {"default_shelf_life", p.default_shelf_life},
          {"shelf_life", p.shelf_life}};
}

SimConfig sim_config_from_json(const Json& j) {
  SimConfig c;
  c.node_count = get<std::size_t>(j, "node_count");
  c.hash_power = get_or<std::vector<std::uint64_t>>(j, "hash_power", std::vector<std::uint64_t>(c.node_count, 1));
  c.latency_rounds = get_or<std::uint64_t>(j, "latency_rounds", c.latency_rounds);
  c.drop_rate = get_or<std::uint64_t>(j, "drop_rate", c.drop_rate);
  c.rounds = get<std::uint64_t>(j, "rounds");
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("partitions")) {
    for (const auto& p : j.at("partitions")) {
      auto range = get<std::vector<std::uint64_t>>(p, "rounds");
      if (range.size() != 2) throw Error(ErrorCode::Malformed, "partition rounds must be [first, last]");
      c.partitions.push_back({range[0], range[1], get<std::vector<std::vector<std::size_t>>>(p, "groups")});
    }
  }
  c.difficulty = get_or<std::uint8_t>(j, "difficulty", c.difficulty);
  c.block_rate = get_or<std::uint64_t>(j, "block_rate", c.block_rate);
  if (j.contains("mining_rounds") && !j.at("mining_rounds").is_null())
    c.mining_rounds = get<std::uint64_t>(j, "mining_rounds");
  c.tx_per_round = get_or<std::uint64_t>(j, "tx_per_round", c.tx_per_round);
  c.rebroadcast_interval = get_or<std::uint64_t>(j, "rebroadcast_interval", c.rebroadcast_interval);
  c.round_seconds = get_or<std::int64_t>(j, "round_seconds", c.round_seconds);
  if (j.contains("adversary") && !j.at("adversary").is_null()) {
    const auto& a = j.at("adversary");
    c.adversary = AdversarySpec{get<std::size_t>(a, "node"), get<std::uint64_t>(a, "withhold_start"),
                                get<std::uint64_t>(a, "withhold_rounds")};
  }
  validate(c);
  return c;
}

Json to_json(const SimConfig& c) {
  Json partitions = Json::array();
  for (const auto& p : c.partitions) partitions.push_back({{"rounds", {p.from_round, p.to_round}}, {"groups", p.groups}});
  Json adversary = nullptr;
  if (c.adversary)
    adversary = {{"node", c.adversary->node},
                 {"withhold_start", c.adversary->withhold_start},
                 {"withhold_rounds", c.adversary->withhold_rounds}};
  return {{"node_count", c.node_count},
          {"hash_power", c.hash_power},
          {"latency_rounds", c.latency_rounds},
          {"drop_rate", c.drop_rate},
          {"partitions", partitions},
          {"rounds", c.rounds},
          {"seed", c.seed},
          {"difficulty", c.difficulty},
          {"block_rate", c.block_rate},
          {"mining_rounds", c.mining_rounds ? Json(*c.mining_rounds) : Json(nullptr)},
          {"tx_per_round", c.tx_per_round},
          {"rebroadcast_interval", c.rebroadcast_interval},
          {"round_seconds", c.round_seconds},
          {"adversary", adversary}};
}

Json to_json(const SimResult& r) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const auto& n = r.nodes[i];
    nodes.push_back({{"node", i},
                     {"height", n.tip.height},
                     {"tip_digest", n.tip.digest.hex()},
                     {"state_digest", n.state_digest.hex()},
                     {"mempool_size", n.mempool_size},
                     {"malformed", n.counters.malformed},
                     {"rejected_blocks", n.counters.rejected_blocks},
                     {"reorgs", n.counters.reorgs}});
  }
  Json out{{"nodes", nodes},
           {"converged", r.converged()},
           {"blocks_mined", r.blocks_mined},
           {"messages_sent", r.messages_sent},
           {"messages_dropped", r.messages_dropped}};
  if (r.released_tip) {
    out["released_tip"] = r.released_tip->hex();
    out["withheld_blocks"] = r.withheld_blocks;
    out["rewrite_succeeded"] = r.rewrite_succeeded;
  }
  return out;
}

}  // namespace agri

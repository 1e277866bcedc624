#include "agri/transaction.hpp"

#include <array>

#include "agri/error.hpp"

namespace agri {

namespace {

constexpr std::array<std::string_view, kTxKindCount> kKindNames = {
    "RegisterActor", "RecordSensorBatch", "CreateLot",    "OpenAuction",  "PlaceBid",
    "CloseAuction",  "StartShipment",     "RecordTelemetry", "ConfirmDelivery", "ProcessLot",
    "QualityCheck",  "RaiseDispute",      "ResolveDispute"};

template <typename T, typename EncodeOne>
void encode_list(Writer& w, const std::vector<T>& items, EncodeOne&& one) {
  w.count(items.size());
  for (const auto& item : items) one(w, item);
}

template <typename DecodeOne>
auto decode_list(Reader& r, std::size_t min_size, DecodeOne&& one) {
  auto n = r.count(min_size);
  std::vector<decltype(one(r))> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(one(r));
  return out;
}

// Minimum encoded sizes, used to bound list counts before allocating.
constexpr std::size_t kReadingMinSize = 32 + 1 + 8 + 8 + 4;
constexpr std::size_t kWaypointSize = 24;

void encode_body(Writer& w, const tx::RegisterActor& b) {
  w.u8(static_cast<std::uint8_t>(b.role));
  w.str(b.display_name);
}
void encode_body(Writer& w, const tx::RecordSensorBatch& b) {
  w.digest(b.subject);
  encode_list(w, b.readings, [](Writer& o, const SensorReading& r) { encode(o, r); });
}
void encode_body(Writer& w, const tx::CreateLot& b) {
  w.str(b.crop_type);
  w.str(b.seed_variety);
  w.str(b.sown_weather_summary);
  w.i64(b.quantity);
  w.i64(b.harvest_time);
}
void encode_body(Writer& w, const tx::OpenAuction& b) {
  w.digest(b.lot_id);
  w.i64(b.reserve_price);
  w.i64(b.open_time);
  w.i64(b.close_time);
}
void encode_body(Writer& w, const tx::PlaceBid& b) {
  w.digest(b.auction_id);
  w.i64(b.amount);
}
void encode_body(Writer& w, const tx::CloseAuction& b) { w.digest(b.auction_id); }
void encode_body(Writer& w, const tx::StartShipment& b) {
  w.digest(b.lot_id);
  w.digest(b.recipient);
  w.str(b.vehicle_id);
  w.i64(b.cold_chain_max);
  w.i64(b.contract_price);
}
void encode_body(Writer& w, const tx::RecordTelemetry& b) {
  w.digest(b.shipment_id);
  encode_list(w, b.waypoints, [](Writer& o, const Waypoint& p) { encode(o, p); });
  encode_list(w, b.temperatures, [](Writer& o, const SensorReading& r) { encode(o, r); });
}
void encode_body(Writer& w, const tx::ConfirmDelivery& b) { w.digest(b.shipment_id); }
void encode_body(Writer& w, const tx::ProcessLot& b) {
  encode_list(w, b.parent_lots, [](Writer& o, const Digest& d) { o.digest(d); });
  encode_list(w, b.outputs, [](Writer& o, const tx::ProcessOutput& p) {
    o.str(p.product_type);
    o.i64(p.quantity);
  });
  w.i64(b.processing_temp);
  w.str(b.method);
}
void encode_body(Writer& w, const tx::QualityCheck& b) {
  w.digest(b.lot_id);
  w.boolean(b.passed);
  w.str(b.notes);
}
void encode_body(Writer& w, const tx::RaiseDispute& b) {
  w.digest(b.subject);
  w.digest(b.respondent);
  w.str(b.reason);
}
void encode_body(Writer& w, const tx::ResolveDispute& b) {
  w.digest(b.dispute_id);
  w.u8(static_cast<std::uint8_t>(b.ruling));
  w.str(b.note);
}

TxBody decode_body(Reader& r, TxKind kind) {
  switch (kind) {
    case TxKind::RegisterActor: {
      tx::RegisterActor b;
      b.role = r.tag<Role>(kRoleCount - 1);
      b.display_name = r.str();
      return b;
    }
    case TxKind::RecordSensorBatch: {
      tx::RecordSensorBatch b;
      b.subject = r.digest();
      b.readings = decode_list(r, kReadingMinSize, decode_reading);
      return b;
    }
    case TxKind::CreateLot: {
      tx::CreateLot b;
      b.crop_type = r.str();
      b.seed_variety = r.str();
      b.sown_weather_summary = r.str();
      b.quantity = r.i64();
      b.harvest_time = r.i64();
      return b;
    }
    case TxKind::OpenAuction: {
      tx::OpenAuction b;
      b.lot_id = r.digest();
      b.reserve_price = r.i64();
      b.open_time = r.i64();
      b.close_time = r.i64();
      return b;
    }
    case TxKind::PlaceBid: {
      tx::PlaceBid b;
      b.auction_id = r.digest();
      b.amount = r.i64();
      return b;
    }
    case TxKind::CloseAuction: return tx::CloseAuction{r.digest()};
    case TxKind::StartShipment: {
      tx::StartShipment b;
      b.lot_id = r.digest();
      b.recipient = r.digest();
      b.vehicle_id = r.str();
      b.cold_chain_max = r.i64();
      b.contract_price = r.i64();
      return b;
    }
    case TxKind::RecordTelemetry: {
      tx::RecordTelemetry b;
      b.shipment_id = r.digest();
      b.waypoints = decode_list(r, kWaypointSize, decode_waypoint);
      b.temperatures = decode_list(r, kReadingMinSize, decode_reading);
      return b;
    }
    case TxKind::ConfirmDelivery: return tx::ConfirmDelivery{r.digest()};
    case TxKind::ProcessLot: {
      tx::ProcessLot b;
      b.parent_lots = decode_list(r, 32, [](Reader& in) { return in.digest(); });
      b.outputs = decode_list(r, 12, [](Reader& in) {
        tx::ProcessOutput p;
        p.product_type = in.str();
        p.quantity = in.i64();
        return p;
      });
      b.processing_temp = r.i64();
      b.method = r.str();
      return b;
    }
    case TxKind::QualityCheck: {
      tx::QualityCheck b;
      b.lot_id = r.digest();
      b.passed = r.boolean();
      b.notes = r.str();
      return b;
    }
    case TxKind::RaiseDispute: {
      tx::RaiseDispute b;
      b.subject = r.digest();
      b.respondent = r.digest();
      b.reason = r.str();
      return b;
    }
    case TxKind::ResolveDispute: {
      tx::ResolveDispute b;
      b.dispute_id = r.digest();
      b.ruling = r.tag<tx::Ruling>(1);
      b.note = r.str();
      return b;
    }
  }
  Reader::fail("unknown transaction kind");
}

void encode_signing_part(Writer& w, const Transaction& t) {
  w.u8(static_cast<std::uint8_t>(t.kind()));
  std::visit([&](const auto& body) { encode_body(w, body); }, t.body);
  w.bytes(t.signer_key);
  w.u64(t.nonce);
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed_bytes(Reader& r, const char* what) {
  auto raw = r.bytes();
  if (raw.size() != N) Reader::fail(std::string(what) + " has wrong length");
  std::array<std::uint8_t, N> out;
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

}  // namespace

std::string_view to_string(TxKind k) { return kKindNames.at(static_cast<std::size_t>(k)); }

std::optional<TxKind> parse_tx_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<TxKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(tx::Ruling r) {
  return r == tx::Ruling::AgainstRespondent ? "AgainstRespondent" : "AgainstRaiser";
}

Bytes Transaction::signing_bytes() const {
  Writer w;
  encode_signing_part(w, *this);
  return w.take();
}

Digest Transaction::id() const { return sha256(signing_bytes()); }

bool Transaction::signature_valid() const {
  auto tx_id = id();
  return verify_signature(signer_key, tx_id.bytes, signature);
}

Transaction make_transaction(TxBody body, const KeyPair& key, std::uint64_t nonce) {
  Transaction t;
  t.body = std::move(body);
  t.signer_key = key.public_key();
  t.nonce = nonce;
  t.signature = key.sign(t.id().bytes);
  return t;
}

void encode(Writer& w, const Transaction& t) {
  encode_signing_part(w, t);
  w.bytes(t.signature);
}

Transaction decode_transaction(Reader& r) {
  Transaction t;
  auto kind = r.tag<TxKind>(kTxKindCount - 1);
  t.body = decode_body(r, kind);
  t.signer_key = fixed_bytes<32>(r, "public key");
  t.nonce = r.u64();
  t.signature = fixed_bytes<64>(r, "signature");
  return t;
}

Bytes encode_transaction(const Transaction& t) {
  Writer w;
  encode(w, t);
  return w.take();
}

Transaction decode_transaction(ByteSpan bytes) {
  Reader r(bytes);
  auto t = decode_transaction(r);
  r.expect_done();
  return t;
}

}  // namespace agri

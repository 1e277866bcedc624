#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "agri/codec.hpp"
#include "agri/crypto.hpp"
#include "agri/digest.hpp"
#include "agri/types.hpp"

namespace agri {

enum class TxKind : std::uint8_t {
  RegisterActor,
  RecordSensorBatch,
  CreateLot,
  OpenAuction,
  PlaceBid,
  CloseAuction,
  StartShipment,
  RecordTelemetry,
  ConfirmDelivery,
  ProcessLot,
  QualityCheck,
  RaiseDispute,
  ResolveDispute,
};
inline constexpr std::uint8_t kTxKindCount = 13;

namespace tx {

/// Self-signed: the signer's key becomes the actor's registered key.
struct RegisterActor {
  Role role = Role::Farmer;
  std::string display_name;
  bool operator==(const RegisterActor&) const = default;
};

struct RecordSensorBatch {
  Digest subject;
  std::vector<SensorReading> readings;
  bool operator==(const RecordSensorBatch&) const = default;
};

struct CreateLot {
  std::string crop_type;
  std::string seed_variety;
  std::string sown_weather_summary;
  std::int64_t quantity = 0;
  std::int64_t harvest_time = 0;
  bool operator==(const CreateLot&) const = default;
};

struct OpenAuction {
  Digest lot_id;
  std::int64_t reserve_price = 0;
  std::int64_t open_time = 0;
  std::int64_t close_time = 0;
  bool operator==(const OpenAuction&) const = default;
};

struct PlaceBid {
  Digest auction_id;
  std::int64_t amount = 0;
  bool operator==(const PlaceBid&) const = default;
};

struct CloseAuction {
  Digest auction_id;
  bool operator==(const CloseAuction&) const = default;
};

/// Signed by the carrier. The recipient must be the lot's current owner.
struct StartShipment {
  Digest lot_id;
  Digest recipient;
  std::string vehicle_id;
  std::int64_t cold_chain_max = 0;
  std::int64_t contract_price = 0;
  bool operator==(const StartShipment&) const = default;
};

struct RecordTelemetry {
  Digest shipment_id;
  std::vector<Waypoint> waypoints;
  std::vector<SensorReading> temperatures;
  bool operator==(const RecordTelemetry&) const = default;
};

struct ConfirmDelivery {
  Digest shipment_id;
  bool operator==(const ConfirmDelivery&) const = default;
};

struct ProcessOutput {
  std::string product_type;
  std::int64_t quantity = 0;
  bool operator==(const ProcessOutput&) const = default;
};

struct ProcessLot {
  std::vector<Digest> parent_lots;
  std::vector<ProcessOutput> outputs;
  std::int64_t processing_temp = 0;
  std::string method;
  bool operator==(const ProcessLot&) const = default;
};

struct QualityCheck {
  Digest lot_id;
  bool passed = true;
  std::string notes;
  bool operator==(const QualityCheck&) const = default;
};

struct RaiseDispute {
  Digest subject;  // lot_id or shipment_id
  Digest respondent;
  std::string reason;
  bool operator==(const RaiseDispute&) const = default;
};

enum class Ruling : std::uint8_t { AgainstRespondent, AgainstRaiser };

struct ResolveDispute {
  Digest dispute_id;
  Ruling ruling = Ruling::AgainstRespondent;
  std::string note;
  bool operator==(const ResolveDispute&) const = default;
};

}  // namespace tx

// Alternative index == TxKind value == wire tag.
using TxBody = std::variant<tx::RegisterActor, tx::RecordSensorBatch, tx::CreateLot, tx::OpenAuction,
                            tx::PlaceBid, tx::CloseAuction, tx::StartShipment, tx::RecordTelemetry,
                            tx::ConfirmDelivery, tx::ProcessLot, tx::QualityCheck, tx::RaiseDispute,
                            tx::ResolveDispute>;

/// A signed supply-chain event. tx_id = SHA-256(signing bytes); the signature is an
/// Ed25519 signature over the 32 tx_id bytes and is excluded from the id.
struct Transaction {
  TxBody body;
  PublicKey signer_key{};
  std::uint64_t nonce = 0;
  Signature signature{};

  TxKind kind() const { return static_cast<TxKind>(body.index()); }
  Digest signer() const { return actor_id_of(signer_key); }
  Bytes signing_bytes() const;
  Digest id() const;
  bool signature_valid() const;

  bool operator==(const Transaction&) const = default;
};

Transaction make_transaction(TxBody body, const KeyPair& key, std::uint64_t nonce = 0);

std::string_view to_string(TxKind k);
std::optional<TxKind> parse_tx_kind(std::string_view s);
std::string_view to_string(tx::Ruling r);

void encode(Writer& w, const Transaction& t);
Transaction decode_transaction(Reader& r);
Bytes encode_transaction(const Transaction& t);
Transaction decode_transaction(ByteSpan bytes);

}  // namespace agri

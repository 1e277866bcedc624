#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agri/chainstate.hpp"
#include "agri/ledger.hpp"

namespace agri {

enum class CustodyVia : std::uint8_t { Harvest, AuctionAward, Delivery, Processing };

std::string_view to_string(CustodyVia v);

/// One holder's possession interval of one lot in the lineage. `to_time` is empty
/// while the holder still has the lot.
struct CustodyEntry {
  Digest lot_id;
  Digest holder;
  std::int64_t from_time = 0;
  std::optional<std::int64_t> to_time;
  CustodyVia acquired_via = CustodyVia::Harvest;
  Digest tx_id;
  bool operator==(const CustodyEntry&) const = default;
};

struct FarmOrigin {
  Digest lot_id;
  Digest farmer;
  std::string farmer_name;
  std::string crop_type;
  std::string seed_variety;
  std::string sown_weather_summary;
  std::int64_t harvest_time = 0;
  std::int64_t quantity = 0;
  Digest tx_id;
  bool operator==(const FarmOrigin&) const = default;
};

struct ProcessingStep {
  Digest lot_id;  // lot produced
  Digest processor;
  std::vector<Digest> inputs;
  std::int64_t processing_temp = 0;
  std::int64_t time = 0;
  std::optional<std::int64_t> expiry_time;
  std::string method;
  Digest tx_id;
  bool operator==(const ProcessingStep&) const = default;
};

/// Temperature statistics over one custody interval (lot and shipment sensors).
struct StorageSummary {
  Digest lot_id;
  Digest holder;
  std::int64_t from_time = 0;
  std::optional<std::int64_t> to_time;
  std::size_t samples = 0;
  std::optional<std::int64_t> min;
  std::optional<std::int64_t> max;
  std::optional<std::int64_t> mean;  // rounded half up
  bool operator==(const StorageSummary&) const = default;
};

struct ShipmentRecord {
  Digest shipment_id;
  Digest lot_id;
  std::string vehicle_id;
  Digest shipper;
  Digest recipient;
  std::int64_t cold_chain_max = 0;
  ShipmentStatus status = ShipmentStatus::InTransit;
  std::optional<std::int64_t> first_breach;
  Digest tx_id;
  bool operator==(const ShipmentRecord&) const = default;
};

struct Anchor {
  Digest tx_id;
  std::uint64_t block_height = 0;
  MerkleProof proof;
  bool operator==(const Anchor&) const = default;
};

/// Consumer-facing chain of custody for a lot and all of its ancestors. Multi-parent
/// lots give a DAG: custody is listed lot by lot, raw lots first by harvest time,
/// then processed lots in creation order.
struct TraceReport {
  Digest lot_id;
  std::vector<FarmOrigin> origins;
  std::vector<CustodyEntry> custody;
  std::vector<ProcessingStep> processing;
  std::vector<StorageSummary> storage_conditions;
  std::vector<std::string> vehicles;
  std::vector<ShipmentRecord> shipments;
  std::vector<QualityRecord> quality_checks;
  std::optional<std::int64_t> expiry_time;
  std::vector<Anchor> anchors;
  bool operator==(const TraceReport&) const = default;
};

/// Reverse reachability over parent links, including `lot_id` itself.
std::vector<Digest> lineage_of(const WorldState& state, const Digest& lot_id);

/// Throws Error(UnknownLot).
TraceReport trace(const WorldState& state, std::span<const Block> chain, const Digest& lot_id);

/// True iff every anchor's proof verifies against the header at its height and every
/// event in the report cites an anchored transaction. Throws Error(HeightOutOfRange).
bool verify_trace(const TraceReport& report, std::span<const BlockHeader> headers);

}  // namespace agri

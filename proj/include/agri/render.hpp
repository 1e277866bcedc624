#pragma once

#include "json.hpp"

#include "agri/chainstate.hpp"
#include "agri/ingest.hpp"
#include "agri/ledger.hpp"
#include "agri/simulation.hpp"
#include "agri/traceability.hpp"

namespace agri {

using Json = nlohmann::json;

// JSON renderings shared by the HTTP API, the CLI and the web console. Field names
// are snake_case, digests are lowercase hex, and fixed-point values render as
// {"value": <integer>, "unit": "<unit>"}. Parsers throw Error(Malformed).

Json fixed(std::int64_t value, std::string_view unit);
std::int64_t parse_fixed(const Json& j);

Json to_json(const SensorReading& r);
SensorReading reading_from_json(const Json& j);

Json to_json(const Transaction& t);
/// Accepts the rendering produced by to_json. `tx_id` is ignored if present.
Transaction transaction_from_json(const Json& j);
/// Kind-specific body only, as it appears under "body".
TxBody body_from_json(TxKind kind, const Json& j);

Json to_json(const BlockHeader& h);
BlockHeader header_from_json(const Json& j);
Json to_json(const Block& b);

Json to_json(const MerkleProof& p);
MerkleProof proof_from_json(const Json& j);

Json to_json(const Lot& lot);
Json to_json(const Auction& a);
Json to_json(const Shipment& s, const Settlement* settlement = nullptr);
Json to_json(const Dispute& d);
Json actor_json(const WorldState& state, const Actor& a);

Json to_json(const TraceReport& report);
TraceReport trace_report_from_json(const Json& j);

Json to_json(const FeedConfig& c);
FeedConfig feed_config_from_json(const Json& j);

ChainParams params_from_json(const Json& j);
Json to_json(const ChainParams& p);

/// Partitions are {"rounds": [first, last], "groups": [[node, ...], ...]}.
SimConfig sim_config_from_json(const Json& j);
Json to_json(const SimConfig& c);
/// Per-node outcome summary (metrics rows are left to metrics_csv).
Json to_json(const SimResult& r);

}  // namespace agri

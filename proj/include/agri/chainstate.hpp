#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "agri/contracts.hpp"
#include "agri/error.hpp"
#include "agri/ledger.hpp"
#include "agri/params.hpp"
#include "agri/reputation.hpp"
#include "agri/transaction.hpp"
#include "agri/types.hpp"

namespace agri {

struct Actor {
  Digest actor_id;
  Role role = Role::Farmer;
  std::string display_name;
  PublicKey public_key{};
  std::int64_t registered_at = 0;
  bool operator==(const Actor&) const = default;
};

struct Lot {
  Digest lot_id;
  Digest owner;
  Digest origin_farm;
  std::string crop_type;
  std::string seed_variety;
  std::string sown_weather_summary;
  std::int64_t quantity = 0;  // grams, fixed at creation
  std::int64_t harvest_time = 0;
  std::vector<Digest> parent_lots;
  std::optional<std::int64_t> processing_temp;  // processed lots only
  std::optional<std::int64_t> expiry_time;      // processed lots only
  std::optional<std::int64_t> processed_time;   // processed lots only
  std::string processing_method;
  LotStatus status = LotStatus::Registered;
  Digest origin_tx;  // CreateLot or ProcessLot that created it

  bool is_raw() const { return parent_lots.empty(); }
  bool operator==(const Lot&) const = default;
};

enum class DisputeStatus : std::uint8_t { Open, Resolved };

struct Dispute {
  Digest dispute_id;
  Digest subject;
  Digest raiser;
  Digest respondent;
  std::string reason;
  DisputeStatus status = DisputeStatus::Open;
  std::optional<tx::Ruling> ruling;
  std::string ruling_note;
  std::int64_t raised_at = 0;
  bool operator==(const Dispute&) const = default;
};

struct QualityRecord {
  Digest inspector;
  bool passed = false;
  std::int64_t time = 0;
  std::string notes;
  Digest tx_id;
  bool operator==(const QualityRecord&) const = default;
};

/// Deterministic materialized state: a pure function of the applied block sequence.
/// Ordered maps give every node the same canonical encoding for state_digest.
struct WorldState {
  std::map<Digest, Actor> actors;
  std::map<Digest, Lot> lots;
  std::map<Digest, Auction> auctions;
  std::map<Digest, Shipment> shipments;
  std::map<Digest, Dispute> disputes;
  std::map<Digest, ReputationScore> reputations;
  std::map<Digest, std::vector<SensorReading>> readings;
  std::map<Digest, std::vector<QualityRecord>> quality;
  std::map<Digest, Settlement> settlements;  // by shipment_id
  std::map<Digest, std::int64_t> balances;   // advisory accounting
  std::set<Digest> applied;                  // tx ids already included
  std::uint64_t height = 0;                  // blocks applied, genesis included
  std::int64_t last_block_time = 0;

  const Actor* actor(const Digest& id) const;
  const Lot* lot(const Digest& id) const;
  bool operator==(const WorldState&) const = default;
};

std::string_view to_string(DisputeStatus s);

/// Role authorization table. Subject-level rules (ownership, bidder eligibility per
/// lot type, participant checks) are applied on top by validate_transaction.
bool role_permits(TxKind kind, Role role);

/// Child lot id for the `index`-th output of a ProcessLot transaction.
Digest processed_lot_id(const Digest& process_tx_id, std::uint32_t index);

/// `block_time` is the timestamp of the block that would include `tx`.
Status validate_transaction(const WorldState& state, const Transaction& tx, std::int64_t block_time,
                            const ChainParams& params = {});

/// Successor state; the input is untouched. Precondition: validate_transaction ok.
WorldState apply_transaction(const WorldState& state, const Transaction& tx, std::int64_t block_time,
                             const ChainParams& params = {});

/// In-place variant used by block application. Returns the scoring effect.
TxEffect apply_transaction_in_place(WorldState& state, const Transaction& tx, std::int64_t block_time,
                                    const ChainParams& params);

/// Validates (with signature checks unless the block was already structurally
/// checked) and applies every transaction of `block` in order, then bumps height.
/// Throws ReplayError(InvalidTransaction).
void apply_block_in_place(WorldState& state, const Block& block, const ChainParams& params,
                          bool check_signatures = true);
WorldState apply_block(const WorldState& state, const Block& block, const ChainParams& params,
                       bool check_signatures = true);

class ReplayError : public Error {
 public:
  ReplayError(ErrorCode code, std::size_t block_index, std::optional<std::size_t> tx_index, Status cause);

  std::size_t block_index() const { return block_index_; }
  std::optional<std::size_t> tx_index() const { return tx_index_; }
  const Status& cause() const { return cause_; }

 private:
  std::size_t block_index_;
  std::optional<std::size_t> tx_index_;
  Status cause_;
};

/// Full replay from genesis: ledger validation, then every transaction against the
/// rolling state. Throws ReplayError(InvalidChain | InvalidTransaction).
WorldState replay(std::span<const Block> blocks, const ChainParams& params = {});

Bytes encode_state(const WorldState& state);
Digest state_digest(const WorldState& state);

}  // namespace agri

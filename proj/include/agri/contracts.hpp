#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "agri/codec.hpp"
#include "agri/digest.hpp"
#include "agri/types.hpp"

namespace agri {

// Smart-contract rules: ascending open-bid auctions over lots, cold-chain delivery
// contracts, and delivery settlement. All functions are pure; chainstate supplies
// the block timestamp as `now`.

enum class AuctionStatus : std::uint8_t { Open, Closed, Failed };

struct Bid {
  Digest bidder;
  std::int64_t amount = 0;
  std::int64_t time = 0;
  bool operator==(const Bid&) const = default;
};

struct AuctionWinner {
  Digest bidder;
  std::int64_t price = 0;
  bool operator==(const AuctionWinner&) const = default;
};

struct Auction {
  Digest auction_id;
  Digest lot_id;
  Digest seller;
  std::int64_t reserve_price = 0;
  std::int64_t open_time = 0;
  std::int64_t close_time = 0;
  std::vector<Bid> bids;
  AuctionStatus status = AuctionStatus::Open;
  std::optional<AuctionWinner> winner;

  /// Highest accepted bid so far, if any.
  const Bid* best_bid() const { return bids.empty() ? nullptr : &bids.back(); }

  bool operator==(const Auction&) const = default;
};

/// Accepts a bid inside the half-open window [open_time, close_time). Throws
/// Error(AuctionClosed | AuctionNotOpen | BidTooLow | SelfBid).
Auction place_bid(Auction auction, const Digest& bidder, std::int64_t amount, std::int64_t now);

/// Bid comparison used to pick a winner: higher amount, then earlier time, then
/// smaller bidder id.
bool outbids(const Bid& a, const Bid& b);

/// Settles an auction once now >= close_time. Bids below reserve never win; with no
/// eligible bid the auction Fails. Throws Error(NotYetClosable | AuctionClosed).
Auction close_auction(Auction auction, std::int64_t now);

enum class ShipmentStatus : std::uint8_t { InTransit, Delivered, Breached };

struct Shipment {
  Digest shipment_id;
  Digest lot_id;
  Digest shipper;
  Digest recipient;
  std::string vehicle_id;
  std::int64_t cold_chain_max = 0;  // centi-degrees Celsius
  std::vector<Waypoint> waypoints;
  std::vector<SensorReading> temperature_log;
  ShipmentStatus status = ShipmentStatus::InTransit;
  std::int64_t contract_price = 0;
  std::int64_t start_time = 0;
  std::optional<std::int64_t> delivered_time;
  std::optional<std::int64_t> first_breach;

  bool operator==(const Shipment&) const = default;
};

struct BreachCheck {
  bool breached = false;
  std::optional<std::int64_t> first_breach;
  bool operator==(const BreachCheck&) const = default;
};

/// A reading breaches when value > cold_chain_max. Throws Error(WrongMetric) if any
/// reading is not a temperature.
BreachCheck cold_chain_check(std::span<const SensorReading> log, std::int64_t cold_chain_max);

struct Settlement {
  Digest payer;
  Digest payee;
  std::int64_t gross = 0;
  std::int64_t penalty = 0;
  std::int64_t net = 0;
  bool operator==(const Settlement&) const = default;
};

/// Recipient pays shipper the contract price less floor(gross * rate) on breach.
/// Throws Error(NotFinal) while the shipment is InTransit.
Settlement settle_delivery(const Shipment& shipment, std::int64_t penalty_rate_micro = 250'000);

std::string_view to_string(AuctionStatus s);
std::string_view to_string(ShipmentStatus s);

void encode(Writer& w, const Auction& a);
void encode(Writer& w, const Shipment& s);

}  // namespace agri

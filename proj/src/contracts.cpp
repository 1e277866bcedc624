#include "agri/contracts.hpp"

#include "agri/error.hpp"

namespace agri {

Auction place_bid(Auction auction, const Digest& bidder, std::int64_t amount, std::int64_t now) {
  if (auction.status != AuctionStatus::Open || now >= auction.close_time)
    throw Error(ErrorCode::AuctionClosed, "bidding window has ended");
  if (now < auction.open_time) throw Error(ErrorCode::AuctionNotOpen, "bidding window has not started");
  if (bidder == auction.seller) throw Error(ErrorCode::SelfBid, "seller cannot bid on own lot");
  if (const auto* best = auction.best_bid()) {
    if (amount <= best->amount)
      throw Error(ErrorCode::BidTooLow, "bid must exceed current best " + std::to_string(best->amount));
  } else if (amount < auction.reserve_price) {
    throw Error(ErrorCode::BidTooLow, "bid below reserve " + std::to_string(auction.reserve_price));
  }
  auction.bids.push_back({bidder, amount, now});
  return auction;
}

bool outbids(const Bid& a, const Bid& b) {
  if (a.amount != b.amount) return a.amount > b.amount;
  if (a.time != b.time) return a.time < b.time;
  return a.bidder < b.bidder;
}

Auction close_auction(Auction auction, std::int64_t now) {
  if (auction.status != AuctionStatus::Open) throw Error(ErrorCode::AuctionClosed, "auction already settled");
  if (now < auction.close_time) throw Error(ErrorCode::NotYetClosable, "close_time not reached");

  const Bid* winner = nullptr;
  for (const auto& bid : auction.bids) {
    if (bid.amount < auction.reserve_price) continue;
    if (!winner || outbids(bid, *winner)) winner = &bid;
  }
  if (winner) {
    auction.status = AuctionStatus::Closed;
    auction.winner = AuctionWinner{winner->bidder, winner->amount};
  } else {
    auction.status = AuctionStatus::Failed;
    auction.winner.reset();
  }
  return auction;
}

BreachCheck cold_chain_check(std::span<const SensorReading> log, std::int64_t cold_chain_max) {
  BreachCheck out;
  for (const auto& r : log) {
    if (r.metric != Metric::Temperature) throw Error(ErrorCode::WrongMetric, "cold chain log must hold temperatures");
    if (r.value > cold_chain_max && (!out.first_breach || r.time < *out.first_breach)) {
      out.breached = true;
      out.first_breach = r.time;
    }
  }
  return out;
}

Settlement settle_delivery(const Shipment& shipment, std::int64_t penalty_rate_micro) {
  if (shipment.status == ShipmentStatus::InTransit) throw Error(ErrorCode::NotFinal, "shipment still in transit");
  if (penalty_rate_micro < 0 || penalty_rate_micro > 1'000'000)
    throw Error(ErrorCode::InvalidArgument, "penalty rate outside [0, 1]");
  Settlement s;
  s.payer = shipment.recipient;
  s.payee = shipment.shipper;
  s.gross = shipment.contract_price;
  if (shipment.status == ShipmentStatus::Breached) {
    auto product = static_cast<__int128>(s.gross) * penalty_rate_micro;
    s.penalty = static_cast<std::int64_t>(product / 1'000'000);
  }
  s.net = s.gross - s.penalty;
  return s;
}

std::string_view to_string(AuctionStatus s) {
  switch (s) {
    case AuctionStatus::Open: return "Open";
    case AuctionStatus::Closed: return "Closed";
    case AuctionStatus::Failed: return "Failed";
  }
  return "";
}

std::string_view to_string(ShipmentStatus s) {
  switch (s) {
    case ShipmentStatus::InTransit: return "InTransit";
    case ShipmentStatus::Delivered: return "Delivered";
    case ShipmentStatus::Breached: return "Breached";
  }
  return "";
}

namespace {

void encode_opt(Writer& w, const std::optional<std::int64_t>& v) {
  w.boolean(v.has_value());
  if (v) w.i64(*v);
}

}  // namespace

void encode(Writer& w, const Auction& a) {
  w.digest(a.auction_id);
  w.digest(a.lot_id);
  w.digest(a.seller);
  w.i64(a.reserve_price);
  w.i64(a.open_time);
  w.i64(a.close_time);
  w.count(a.bids.size());
  for (const auto& b : a.bids) {
    w.digest(b.bidder);
    w.i64(b.amount);
    w.i64(b.time);
  }
  w.u8(static_cast<std::uint8_t>(a.status));
  w.boolean(a.winner.has_value());
  if (a.winner) {
    w.digest(a.winner->bidder);
    w.i64(a.winner->price);
  }
}

void encode(Writer& w, const Shipment& s) {
  w.digest(s.shipment_id);
  w.digest(s.lot_id);
  w.digest(s.shipper);
  w.digest(s.recipient);
  w.str(s.vehicle_id);
  w.i64(s.cold_chain_max);
  w.count(s.waypoints.size());
  for (const auto& p : s.waypoints) encode(w, p);
  w.count(s.temperature_log.size());
  for (const auto& r : s.temperature_log) encode(w, r);
  w.u8(static_cast<std::uint8_t>(s.status));
  w.i64(s.contract_price);
  w.i64(s.start_time);
  encode_opt(w, s.delivered_time);
  encode_opt(w, s.first_breach);
}

}  // namespace agri

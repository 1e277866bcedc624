#include "agri/traceability.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace agri {

std::string_view to_string(CustodyVia v) {
  switch (v) {
    case CustodyVia::Harvest: return "Harvest";
    case CustodyVia::AuctionAward: return "AuctionAward";
    case CustodyVia::Delivery: return "Delivery";
    case CustodyVia::Processing: return "Processing";
  }
  return "";
}

std::vector<Digest> lineage_of(const WorldState& state, const Digest& lot_id) {
  std::vector<Digest> out;
  std::set<Digest> seen{lot_id};
  std::deque<Digest> queue{lot_id};
  while (!queue.empty()) {
    auto id = queue.front();
    queue.pop_front();
    out.push_back(id);
    const auto* lot = state.lot(id);
    if (!lot) continue;
    for (const auto& parent : lot->parent_lots) {
      if (seen.insert(parent).second) queue.push_back(parent);
    }
  }
  return out;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  auto q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct Collector {
  const WorldState& state;
  std::set<Digest> lineage;
  std::set<Digest> shipments;  // of lineage lots
  std::set<Digest> auctions;   // of lineage lots
  std::set<Digest> disputes;   // about lineage lots or their shipments

  std::map<Digest, std::vector<CustodyEntry>> custody_by_lot;
  std::map<Digest, std::int64_t> consumed_at;  // lot -> processing time
  std::map<Digest, std::size_t> creation_order;
  TraceReport report;

  explicit Collector(const WorldState& s, const std::vector<Digest>& lots) : state(s), lineage(lots.begin(), lots.end()) {
    for (const auto& [id, a] : state.auctions)
      if (lineage.contains(a.lot_id)) auctions.insert(id);
    for (const auto& [id, sh] : state.shipments)
      if (lineage.contains(sh.lot_id)) shipments.insert(id);
    for (const auto& [id, d] : state.disputes)
      if (lineage.contains(d.subject) || shipments.contains(d.subject)) disputes.insert(id);
  }

  bool touches_subject(const Digest& subject) const { return lineage.contains(subject) || shipments.contains(subject); }

  void add_custody(const Digest& lot, const Digest& holder, std::int64_t time, CustodyVia via, const Digest& tx_id) {
    custody_by_lot[lot].push_back({lot, holder, time, std::nullopt, via, tx_id});
  }

  // Returns whether the transaction touches the lineage.
  bool visit(const Transaction& tx, const Digest& tx_id, std::int64_t time, std::size_t order) {
    return std::visit([&](const auto& body) { return on(body, tx, tx_id, time, order); }, tx.body);
  }

  bool on(const tx::RegisterActor&, const Transaction&, const Digest&, std::int64_t, std::size_t) { return false; }

  bool on(const tx::RecordSensorBatch& b, const Transaction&, const Digest&, std::int64_t, std::size_t) {
    return touches_subject(b.subject);
  }

  bool on(const tx::CreateLot& b, const Transaction& tx, const Digest& tx_id, std::int64_t time, std::size_t order) {
    if (!lineage.contains(tx_id)) return false;
    const auto* farmer = state.actor(tx.signer());
    report.origins.push_back({tx_id, tx.signer(), farmer ? farmer->display_name : std::string(), b.crop_type,
                              b.seed_variety, b.sown_weather_summary, b.harvest_time, b.quantity, tx_id});
    creation_order[tx_id] = order;
    add_custody(tx_id, tx.signer(), std::min(time, b.harvest_time), CustodyVia::Harvest, tx_id);
    return true;
  }

  bool on(const tx::OpenAuction& b, const Transaction&, const Digest&, std::int64_t, std::size_t) {
    return lineage.contains(b.lot_id);
  }

  bool on(const tx::PlaceBid& b, const Transaction&, const Digest&, std::int64_t, std::size_t) {
    return auctions.contains(b.auction_id);
  }

  bool on(const tx::CloseAuction& b, const Transaction&, const Digest& tx_id, std::int64_t time, std::size_t) {
    if (!auctions.contains(b.auction_id)) return false;
    const auto& auction = state.auctions.at(b.auction_id);
    if (auction.status == AuctionStatus::Closed && auction.winner)
      add_custody(auction.lot_id, auction.winner->bidder, time, CustodyVia::AuctionAward, tx_id);
    return true;
  }

  bool on(const tx::StartShipment& b, const Transaction& tx, const Digest& tx_id, std::int64_t, std::size_t) {
    if (!lineage.contains(b.lot_id)) return false;
    if (std::find(report.vehicles.begin(), report.vehicles.end(), b.vehicle_id) == report.vehicles.end())
      report.vehicles.push_back(b.vehicle_id);
    const auto& sh = state.shipments.at(tx_id);
    report.shipments.push_back({tx_id, b.lot_id, b.vehicle_id, tx.signer(), b.recipient, b.cold_chain_max, sh.status,
                                sh.first_breach, tx_id});
    return true;
  }

  bool on(const tx::RecordTelemetry& b, const Transaction&, const Digest&, std::int64_t, std::size_t) {
    return shipments.contains(b.shipment_id);
  }

  bool on(const tx::ConfirmDelivery& b, const Transaction&, const Digest& tx_id, std::int64_t time, std::size_t) {
    if (!shipments.contains(b.shipment_id)) return false;
    const auto& sh = state.shipments.at(b.shipment_id);
    add_custody(sh.lot_id, sh.recipient, time, CustodyVia::Delivery, tx_id);
    return true;
  }

  bool on(const tx::ProcessLot& b, const Transaction& tx, const Digest& tx_id, std::int64_t time, std::size_t order) {
    bool touched = false;
    for (std::uint32_t i = 0; i < b.outputs.size(); ++i) {
      auto child = processed_lot_id(tx_id, i);
      if (!lineage.contains(child)) continue;
      touched = true;
      const auto* lot = state.lot(child);
      report.processing.push_back({child, tx.signer(), b.parent_lots, b.processing_temp, time,
                                   lot ? lot->expiry_time : std::nullopt, b.method, tx_id});
      creation_order[child] = order;
      add_custody(child, tx.signer(), time, CustodyVia::Processing, tx_id);
    }
    for (const auto& parent : b.parent_lots) {
      if (lineage.contains(parent)) {
        consumed_at[parent] = time;
        touched = true;
      }
    }
    return touched;
  }

  bool on(const tx::QualityCheck& b, const Transaction&, const Digest&, std::int64_t, std::size_t) {
    return lineage.contains(b.lot_id);
  }

  bool on(const tx::RaiseDispute&, const Transaction&, const Digest& tx_id, std::int64_t, std::size_t) {
    return disputes.contains(tx_id);
  }

  bool on(const tx::ResolveDispute& b, const Transaction&, const Digest&, std::int64_t, std::size_t) {
    return disputes.contains(b.dispute_id);
  }

  std::vector<Digest> ordered_lots() const {
    std::vector<Digest> raw, processed;
    for (const auto& [lot, entries] : custody_by_lot) {
      (state.lots.at(lot).is_raw() ? raw : processed).push_back(lot);
    }
    std::sort(raw.begin(), raw.end(), [&](const Digest& a, const Digest& b) {
      auto ta = state.lots.at(a).harvest_time, tb = state.lots.at(b).harvest_time;
      return ta != tb ? ta < tb : a < b;
    });
    std::sort(processed.begin(), processed.end(), [&](const Digest& a, const Digest& b) {
      auto oa = creation_order.at(a), ob = creation_order.at(b);
      return oa != ob ? oa < ob : a < b;
    });
    raw.insert(raw.end(), processed.begin(), processed.end());
    return raw;
  }

  StorageSummary summarize(const CustodyEntry& entry) const {
    StorageSummary s{entry.lot_id, entry.holder, entry.from_time, entry.to_time, 0, {}, {}, {}};
    std::int64_t sum = 0;
    auto take = [&](const std::vector<SensorReading>& log) {
      for (const auto& r : log) {
        if (r.metric != Metric::Temperature) continue;
        if (r.time < entry.from_time || (entry.to_time && r.time >= *entry.to_time)) continue;
        s.min = s.min ? std::min(*s.min, r.value) : r.value;
        s.max = s.max ? std::max(*s.max, r.value) : r.value;
        sum += r.value;
        ++s.samples;
      }
    };
    if (auto it = state.readings.find(entry.lot_id); it != state.readings.end()) take(it->second);
    for (const auto& id : shipments) {
      const auto& sh = state.shipments.at(id);
      if (sh.lot_id == entry.lot_id) take(sh.temperature_log);
    }
    if (s.samples > 0) {
      auto n = static_cast<std::int64_t>(s.samples);
      s.mean = floor_div(2 * sum + n, 2 * n);
    }
    return s;
  }

  void finish(const Digest& lot_id) {
    for (const auto& lot : ordered_lots()) {
      auto& entries = custody_by_lot.at(lot);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i + 1 < entries.size()) {
          entries[i].to_time = entries[i + 1].from_time;
        } else if (auto it = consumed_at.find(lot); it != consumed_at.end()) {
          entries[i].to_time = it->second;
        }
        report.custody.push_back(entries[i]);
        report.storage_conditions.push_back(summarize(entries[i]));
      }
    }
    for (const auto& lot : lineage) {
      if (auto it = state.quality.find(lot); it != state.quality.end())
        report.quality_checks.insert(report.quality_checks.end(), it->second.begin(), it->second.end());
    }
    std::sort(report.quality_checks.begin(), report.quality_checks.end(),
              [](const QualityRecord& a, const QualityRecord& b) { return a.time < b.time; });
    report.lot_id = lot_id;
    report.expiry_time = state.lots.at(lot_id).expiry_time;
  }
};

}  // namespace

TraceReport trace(const WorldState& state, std::span<const Block> chain, const Digest& lot_id) {
  if (!state.lot(lot_id)) throw Error(ErrorCode::UnknownLot, lot_id.hex());
  Collector c(state, lineage_of(state, lot_id));

  std::size_t order = 0;
  for (std::size_t height = 0; height < chain.size(); ++height) {
    const auto& block = chain[height];
    auto ids = block.tx_ids();
    std::vector<Digest> cited;
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
      if (c.visit(block.transactions[i], ids[i], block.header.timestamp, order++)) cited.push_back(ids[i]);
    }
    for (const auto& tx_id : cited) c.report.anchors.push_back({tx_id, height, merkle_proof(ids, tx_id)});
  }
  c.finish(lot_id);
  return std::move(c.report);
}

bool verify_trace(const TraceReport& report, std::span<const BlockHeader> headers) {
  std::set<Digest> anchored;
  for (const auto& anchor : report.anchors) {
    if (anchor.block_height >= headers.size())
      throw Error(ErrorCode::HeightOutOfRange, "anchor height " + std::to_string(anchor.block_height));
    const auto& header = headers[anchor.block_height];
    if (anchor.proof.leaf != anchor.tx_id) return false;
    if (anchor.proof.root != header.merkle_root) return false;
    if (!verify_proof(anchor.proof)) return false;
    anchored.insert(anchor.tx_id);
  }
  auto cites = [&](const Digest& tx_id) { return anchored.contains(tx_id); };
  for (const auto& o : report.origins)
    if (!cites(o.tx_id)) return false;
  for (const auto& c : report.custody)
    if (!cites(c.tx_id)) return false;
  for (const auto& p : report.processing)
    if (!cites(p.tx_id)) return false;
  for (const auto& s : report.shipments)
    if (!cites(s.tx_id)) return false;
  for (const auto& q : report.quality_checks)
    if (!cites(q.tx_id)) return false;
  return true;
}

}  // namespace agri

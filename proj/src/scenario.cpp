#include "agri/scenario.hpp"

#include <array>
#include <random>

#include "agri/ingest.hpp"

namespace agri {

ChainBuilder::ChainBuilder(ChainParams params, std::int64_t block_spacing)
    : params_(std::move(params)), spacing_(block_spacing) {
  chain_.push_back(make_genesis(params_));
  state_ = apply_block(WorldState{}, chain_.front(), params_, false);
  open_time_ = chain_.front().header.timestamp + spacing_;
}

Transaction ChainBuilder::sign(TxBody body, const KeyPair& key) {
  return make_transaction(std::move(body), key, nonces_[key.actor_id()]++);
}

Digest ChainBuilder::add(const Transaction& tx) {
  auto status = validate_transaction(state_, tx, open_time_, params_);
  if (!status.ok()) throw Error(status.code, std::string(to_string(tx.kind())) + ": " + status.message);
  apply_transaction_in_place(state_, tx, open_time_, params_);
  staged_.push_back(tx);
  ++tx_count_;
  return tx.id();
}

Digest ChainBuilder::submit(TxBody body, const KeyPair& key) { return add(sign(std::move(body), key)); }

KeyPair ChainBuilder::actor(const std::string& label, Role role) {
  auto key = KeyPair::from_label(label);
  submit(tx::RegisterActor{role, label}, key);
  return key;
}

const Block& ChainBuilder::seal() {
  chain_.push_back(mine_block(chain_.back().hash(), std::move(staged_), params_.difficulty, open_time_));
  staged_.clear();
  state_.height += 1;
  state_.last_block_time = open_time_;
  open_time_ += spacing_;
  return chain_.back();
}

void ChainBuilder::advance(std::int64_t seconds) {
  if (!staged_.empty()) seal();
  open_time_ += seconds;
}

namespace {

constexpr std::int64_t kDemoStart = 1'709'251'200;  // 2024-03-01T00:00:00Z
constexpr std::int64_t kColdChainMax = 800;         // 8.00 C

struct Done {};

class DemoRun {
 public:
  explicit DemoRun(const DemoOptions& o) : opts_(o), rng_(o.seed) {
    ChainParams params;
    params.difficulty = o.difficulty;
    b_ = ChainBuilder(params, 60);
    b_.advance(kDemoStart - b_.now());
  }

  DemoChain run() {
    try {
      setup();
      for (std::size_t story = 0;; ++story) harvest_story(story);
    } catch (const Done&) {
    }
    if (b_.staged() > 0) b_.seal();
    out_.params = b_.params();
    out_.blocks = b_.chain();
    return std::move(out_);
  }

 private:
  std::uint64_t pick(std::uint64_t n) { return rng_() % n; }

  Digest emit(TxBody body, const KeyPair& key) { return emit(b_.sign(std::move(body), key)); }

  Digest emit(const Transaction& tx) {
    // The last transaction gets a block of its own so the log ends in a small record.
    if (b_.tx_count() + 1 == opts_.target_txs && b_.staged() > 0) b_.seal();
    auto id = b_.add(tx);
    if (b_.tx_count() >= opts_.target_txs) throw Done{};
    if (b_.staged() >= opts_.block_txs) b_.seal();
    return id;
  }

  KeyPair enroll(const std::string& label, Role role) {
    auto key = KeyPair::from_label("demo/" + label);
    out_.keys.emplace(label, key);
    emit(tx::RegisterActor{role, label}, key);
    return key;
  }

  void setup() {
    for (const auto* name : {"farmer-asha", "farmer-bram", "farmer-chen"}) farmers_.push_back(enroll(name, Role::Farmer));
    for (const auto* name : {"processor-delta", "processor-elm"}) processors_.push_back(enroll(name, Role::Processor));
    for (const auto* name : {"distributor-fjord", "distributor-gale"}) distributors_.push_back(enroll(name, Role::Distributor));
    for (const auto* name : {"retailer-harbor", "retailer-iris"}) retailers_.push_back(enroll(name, Role::Retailer));
    consumer_ = enroll("consumer-jo", Role::Consumer);
    negotiator_ = enroll("negotiator-kai", Role::Negotiator);
    b_.advance(3600);
  }

  // Auctions `lot` from `seller` to `bidders`; returns the winner's key.
  const KeyPair& auction(const Digest& lot, const KeyPair& seller, const std::vector<KeyPair>& bidders,
                         std::int64_t reserve) {
    auto open = b_.now();
    auto id = emit(tx::OpenAuction{lot, reserve, open, open + 1800}, seller);
    b_.seal();
    auto bids = 1 + pick(3);
    std::int64_t amount = reserve + static_cast<std::int64_t>(pick(500));
    const KeyPair* leader = nullptr;
    for (std::uint64_t k = 0; k < bids; ++k) {
      leader = &bidders[(k + pick(2)) % bidders.size()];
      emit(tx::PlaceBid{id, amount}, *leader);
      amount += 100 + static_cast<std::int64_t>(pick(400));
    }
    b_.advance(1800);
    emit(tx::CloseAuction{id}, seller);
    return *leader;
  }

  // Ships `lot` from `carrier` to `recipient` over an hour of telemetry.
  Digest deliver(const Digest& lot, const KeyPair& carrier, const KeyPair& recipient, bool breach) {
    auto start = b_.now();
    auto vehicle = "truck-" + std::to_string(1 + pick(6));
    auto shipment = emit(tx::StartShipment{lot, recipient.actor_id(), vehicle, kColdChainMax,
                                           4'000 + static_cast<std::int64_t>(pick(6'000))},
                         carrier);
    out_.shipments.push_back(shipment);
    b_.advance(3600);

    FeedConfig feed = demo_feed_config(shipment, rng_());
    feed.profiles.resize(1);  // temperature only
    feed.start_time = start;
    feed.duration = 3600;
    feed.sample_interval = 600;
    feed.device_id = vehicle + "-probe";
    if (breach) feed.breach_at = start + 1800;
    tx::RecordTelemetry telemetry{shipment, {}, simulate_sensor_feed(feed)};
    auto lat = 40'000'000 + static_cast<std::int64_t>(pick(2'000'000));
    auto lon = -3'000'000 + static_cast<std::int64_t>(pick(2'000'000));
    for (std::int64_t k = 0; k < 3; ++k) telemetry.waypoints.push_back({lat + k * 15'000, lon + k * 20'000, start + k * 1800});
    emit(std::move(telemetry), carrier);
    emit(tx::ConfirmDelivery{shipment}, recipient);
    return shipment;
  }

  void harvest_story(std::size_t story) {
    static constexpr std::array<const char*, 4> crops{"tomato", "apple", "wheat", "mango"};
    static constexpr std::array<const char*, 4> varieties{"roma", "gala", "durum", "alphonso"};
    const auto& farmer = farmers_[story % farmers_.size()];
    auto crop = pick(crops.size());

    auto lot = emit(tx::CreateLot{crops[crop], varieties[crop], "sown in mild spring rain, 18 C average",
                                  500'000 + static_cast<std::int64_t>(pick(1'500'000)), b_.now() - 7200},
                    farmer);
    out_.raw_lots.push_back(lot);

    FeedConfig field = demo_feed_config(lot, rng_());
    field.start_time = b_.now() - 7200;
    field.duration = 3600;
    field.sample_interval = 900;
    field.device_id = "field-station-" + std::to_string(story % farmers_.size());
    emit(tx::RecordSensorBatch{lot, simulate_sensor_feed(field)}, farmer);

    const auto& buyer = auction(lot, farmer, processors_, 2'000 + static_cast<std::int64_t>(pick(3'000)));
    bool breach = opts_.breach_every > 0 && story % opts_.breach_every == opts_.breach_every - 1;
    deliver(lot, farmer, buyer, breach);

    auto& held = holdings_[buyer.actor_id()];
    held.push_back(lot);
    if (held.size() >= 2) process(buyer, held, story);
  }

  void process(const KeyPair& processor, std::vector<Digest>& parents, std::size_t story) {
    static constexpr std::array<const char*, 3> products{"juice", "puree", "flour"};
    std::int64_t input = 0;
    for (const auto& p : parents) input += b_.state().lots.at(p).quantity;
    auto first = products[pick(products.size())];
    auto second = products[pick(products.size())];
    auto tx_id = emit(tx::ProcessLot{parents,
                                     {{first, input / 2}, {second, input / 3}},
                                     static_cast<std::int64_t>(7'000 + pick(1'500)),
                                     "wash, pulp, pasteurize"},
                      processor);
    parents.clear();
    auto product = processed_lot_id(tx_id, 0);
    auto side = processed_lot_id(tx_id, 1);
    out_.processed_lots.push_back(product);
    out_.processed_lots.push_back(side);
    b_.seal();

    const auto& distributor = auction(product, processor, distributors_, 8'000);
    deliver(product, processor, distributor, false);
    const auto& retailer = retailers_[pick(retailers_.size())];
    emit(tx::QualityCheck{product, true, "seal intact, brix within range"}, retailer);
    if (story % 3 == 0) emit(tx::QualityCheck{side, false, "mold spots on sample"}, distributors_.front());

    if (story % 4 == 1) {
      auto dispute = emit(tx::RaiseDispute{product, distributor.actor_id(), "package arrived warm"}, consumer_);
      b_.seal();
      emit(tx::ResolveDispute{dispute, pick(2) ? tx::Ruling::AgainstRespondent : tx::Ruling::AgainstRaiser,
                              "reviewed probe log"},
           negotiator_);
    }
    b_.advance(600);
  }

  DemoOptions opts_;
  std::mt19937_64 rng_;
  ChainBuilder b_;
  DemoChain out_;
  std::vector<KeyPair> farmers_, processors_, distributors_, retailers_;
  KeyPair consumer_ = KeyPair::from_label("demo/unset");
  KeyPair negotiator_ = KeyPair::from_label("demo/unset");
  std::map<Digest, std::vector<Digest>> holdings_;
};

}  // namespace

DemoChain build_demo(const DemoOptions& options) {
  if (options.target_txs == 0) throw Error(ErrorCode::InvalidArgument, "target_txs must be positive");
  if (options.block_txs == 0) throw Error(ErrorCode::InvalidArgument, "block_txs must be positive");
  return DemoRun(options).run();
}

}  // namespace agri

#include "agri/simulation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace agri {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool chance(std::mt19937_64& rng, std::uint64_t micro) {
  if (micro == 0) return false;
  if (micro >= 1'000'000) return true;
  return rng() % 1'000'000 < micro;
}

int group_of(const PartitionSpec& p, std::size_t node) {
  for (std::size_t g = 0; g < p.groups.size(); ++g)
    if (std::find(p.groups[g].begin(), p.groups[g].end(), node) != p.groups[g].end()) return static_cast<int>(g);
  return -1;
}

}  // namespace

std::uint64_t SimConfig::mining_end() const {
  if (mining_rounds) return *mining_rounds;
  return rounds > quiet_tail() ? rounds - quiet_tail() : 0;
}

ChainParams SimConfig::chain_params() const {
  ChainParams p;
  p.difficulty = difficulty;
  return p;
}

void validate(const SimConfig& c) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (c.node_count == 0) bad("node_count must be positive");
  if (c.hash_power.size() != c.node_count) bad("hash_power needs one weight per node");
  for (auto w : c.hash_power)
    if (w == 0) bad("hash_power weights must be positive");
  if (c.latency_rounds == 0) bad("latency_rounds must be at least 1");
  if (c.drop_rate > 1'000'000) bad("drop_rate must be within [0, 1000000]");
  if (c.block_rate > 1'000'000) bad("block_rate must be within [0, 1000000]");
  for (const auto& p : c.partitions) {
    if (p.from_round > p.to_round) bad("partition range is reversed");
    for (const auto& g : p.groups)
      for (auto n : g)
        if (n >= c.node_count) bad("partition names an unknown node");
  }
  if (c.adversary && c.adversary->node >= c.node_count) bad("adversary names an unknown node");
}

bool SimResult::converged() const {
  if (nodes.empty()) return true;
  return std::all_of(nodes.begin(), nodes.end(), [&](const NodeOutcome& n) {
    return n.tip == nodes.front().tip && n.state_digest == nodes.front().state_digest;
  });
}

Simulation::Simulation(SimConfig config)
    : config_(std::move(config)),
      lottery_rng_(splitmix(config_.seed ^ 0x6c6f7474657279ULL)),
      network_rng_(splitmix(config_.seed ^ 0x6e6574776f726bULL)),
      workload_rng_(splitmix(config_.seed ^ 0x776f726b6c6f6164ULL)) {
  validate(config_);
  auto params = config_.chain_params();
  nodes_.reserve(config_.node_count);
  for (std::size_t i = 0; i < config_.node_count; ++i) nodes_.emplace_back(params);
  inboxes_.resize(config_.node_count);
}

bool Simulation::withholding(std::size_t node) const {
  const auto& a = config_.adversary;
  return a && a->node == node && round_ >= a->withhold_start && round_ < a->withhold_start + a->withhold_rounds;
}

bool Simulation::partitioned(std::uint64_t round, std::size_t a, std::size_t b) const {
  for (const auto& p : config_.partitions) {
    if (round < p.from_round || round > p.to_round) continue;
    if (group_of(p, a) != group_of(p, b)) return true;
  }
  return false;
}

void Simulation::send(std::size_t from, const Envelope& envelope) {
  auto bytes = encode_message(envelope.message);
  for (std::size_t to = 0; to < nodes_.size(); ++to) {
    if (to == from || (envelope.to && *envelope.to != to)) continue;
    ++result_.messages_sent;
    if (partitioned(round_, from, to) || chance(network_rng_, config_.drop_rate)) {
      ++result_.messages_dropped;
      continue;
    }
    inboxes_[to].push_back({round_ + config_.latency_rounds, from, bytes});
  }
}

void Simulation::deliver(std::size_t i) {
  auto& inbox = inboxes_[i];
  while (!inbox.empty() && inbox.front().deliver_round <= round_) {
    auto msg = std::move(inbox.front());
    inbox.pop_front();
    if (withholding(i) && !msg.bytes.empty()) {
      auto kind = msg.bytes.front();
      if (kind == static_cast<std::uint8_t>(MessageKind::BlockAnnounce) ||
          kind == static_cast<std::uint8_t>(MessageKind::InventoryResponse))
        continue;
    }
    for (const auto& out : nodes_[i].handle_message(msg.from, msg.bytes)) send(i, out);
  }
}

Transaction Simulation::next_workload_tx() {
  auto nonce = tx_counter_++;
  if (farmers_.empty() || workload_rng_() % 3 == 0) {
    auto label = "sim-farmer-" + std::to_string(farmers_.size());
    farmers_.push_back(KeyPair::from_label(label));
    return make_transaction(tx::RegisterActor{Role::Farmer, label}, farmers_.back(), nonce);
  }
  const auto& farmer = farmers_[workload_rng_() % farmers_.size()];
  tx::CreateLot lot;
  lot.crop_type = "maize";
  lot.quantity = 1'000 + static_cast<std::int64_t>(workload_rng_() % 9'000);
  lot.harvest_time = config_.round_seconds * static_cast<std::int64_t>(round_);
  return make_transaction(std::move(lot), farmer, nonce);
}

void Simulation::submit_workload() {
  for (std::uint64_t k = 0; k < config_.tx_per_round; ++k) {
    auto tx = next_workload_tx();
    auto target = static_cast<std::size_t>(workload_rng_() % nodes_.size());
    if (nodes_[target].submit(tx).ok()) broadcast(target, tx_announce(tx));
  }
}

void Simulation::run_lottery() {
  if (round_ >= config_.mining_end()) return;
  if (!chance(lottery_rng_, config_.block_rate)) return;
  auto total = std::accumulate(config_.hash_power.begin(), config_.hash_power.end(), std::uint64_t{0});
  auto ticket = lottery_rng_() % total;
  std::size_t winner = 0;
  while (ticket >= config_.hash_power[winner]) ticket -= config_.hash_power[winner++];

  auto block = nodes_[winner].mine(config_.round_seconds * static_cast<std::int64_t>(round_));
  ++result_.blocks_mined;
  if (withholding(winner)) {
    ++result_.withheld_blocks;
    return;
  }
  broadcast(winner, block_announce(block));
}

void Simulation::step() {
  if (finished()) return;
  const auto& adv = config_.adversary;
  if (adv && adv->withhold_rounds > 0 && round_ == adv->withhold_start + adv->withhold_rounds) {
    const auto& node = nodes_[adv->node];
    result_.released_tip = node.tip().digest;
    broadcast(adv->node, inventory_response(node.tip_segment(Node::kInventoryDepth)));
  }

  for (auto& n : nodes_) n.set_time(config_.round_seconds * static_cast<std::int64_t>(round_));
  for (std::size_t i = 0; i < nodes_.size(); ++i) deliver(i);
  submit_workload();
  run_lottery();

  if (config_.rebroadcast_interval > 0 && round_ % config_.rebroadcast_interval == 0) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (withholding(i)) continue;
      broadcast(i, inventory_response(nodes_[i].tip_segment(kSyncDepth)));
    }
  }

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    result_.metrics.push_back({round_, i, n.tip().height, n.mempool().size(), n.tip().digest});
  }
  ++round_;
}

bool Simulation::tips_agree() const {
  return std::all_of(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.tip() == nodes_.front().tip(); });
}

SimResult Simulation::result() const {
  SimResult out = result_;
  out.nodes.clear();
  for (const auto& n : nodes_)
    out.nodes.push_back({n.tip(), state_digest(*n.tip_state()), n.mempool().size(), n.counters()});
  if (out.released_tip && out.withheld_blocks > 0) {
    out.rewrite_succeeded = true;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (i == config_.adversary->node) continue;
      if (!nodes_[i].on_main_chain(*out.released_tip)) out.rewrite_succeeded = false;
    }
  }
  return out;
}

SimResult run_simulation(const SimConfig& config) {
  Simulation sim(config);
  while (!sim.finished()) sim.step();
  return sim.result();
}

std::string metrics_csv(const SimResult& result) {
  std::ostringstream out;
  out << "round,node,height,mempool_size,tip_digest\n";
  for (const auto& m : result.metrics)
    out << m.round << ',' << m.node << ',' << m.height << ',' << m.mempool_size << ',' << m.tip.hex() << '\n';
  return out.str();
}

}  // namespace agri

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "agri/crypto.hpp"
#include "agri/network.hpp"

namespace agri {

/// Cross-group messages sent during rounds [from_round, to_round] are lost.
/// Nodes not listed in any group share one implicit group.
struct PartitionSpec {
  std::uint64_t from_round = 0;
  std::uint64_t to_round = 0;
  std::vector<std::vector<std::size_t>> groups;
};

/// A miner that keeps its blocks private for `withhold_rounds` rounds starting
/// at `withhold_start`, ignoring everyone else's blocks meanwhile, then
/// publishes its fork and behaves honestly.
struct AdversarySpec {
  std::size_t node = 0;
  std::uint64_t withhold_start = 0;
  std::uint64_t withhold_rounds = 0;
};

struct SimConfig {
  std::size_t node_count = 1;
  std::vector<std::uint64_t> hash_power;  // one positive weight per node
  std::uint64_t latency_rounds = 1;
  std::uint64_t drop_rate = 0;  // micro units per message
  std::vector<PartitionSpec> partitions;
  std::uint64_t rounds = 10;
  std::uint64_t seed = 0;

  std::uint8_t difficulty = 8;
  /// Chance that a round produces a block at all, micro units.
  std::uint64_t block_rate = 1'000'000;
  /// Mining stops at this round; defaults to leaving quiet_tail() rounds for propagation.
  std::optional<std::uint64_t> mining_rounds;
  std::uint64_t tx_per_round = 1;
  /// Every this many rounds each node pushes its recent chain to all peers (0 = never).
  std::uint64_t rebroadcast_interval = 1;
  std::int64_t round_seconds = 60;
  std::optional<AdversarySpec> adversary;

  std::uint64_t quiet_tail() const { return 4 * latency_rounds + 2; }
  std::uint64_t mining_end() const;
  ChainParams chain_params() const;
};

/// Throws Error(InvalidArgument).
void validate(const SimConfig& config);

struct RoundMetric {
  std::uint64_t round = 0;
  std::size_t node = 0;
  std::uint64_t height = 0;
  std::size_t mempool_size = 0;
  Digest tip;
};

struct NodeOutcome {
  ChainTip tip;
  Digest state_digest;
  std::size_t mempool_size = 0;
  NodeCounters counters;
};

struct SimResult {
  std::vector<NodeOutcome> nodes;
  std::vector<RoundMetric> metrics;
  std::uint64_t blocks_mined = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_dropped = 0;
  /// Adversary runs only: the published private tip and whether every honest
  /// node's adopted chain contains it at the end.
  std::optional<Digest> released_tip;
  std::uint64_t withheld_blocks = 0;
  bool rewrite_succeeded = false;

  bool converged() const;
};

class Simulation {
 public:
  /// Private-fork segment pushed on release and for anti-entropy.
  static constexpr std::size_t kSyncDepth = 16;

  explicit Simulation(SimConfig config);

  void step();
  bool finished() const { return round_ >= config_.rounds; }
  std::uint64_t round() const { return round_; }
  std::size_t node_count() const { return nodes_.size(); }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  const SimConfig& config() const { return config_; }
  bool tips_agree() const;
  SimResult result() const;

 private:
  struct InFlight {
    std::uint64_t deliver_round;
    std::size_t from;
    Bytes bytes;
  };

  bool withholding(std::size_t node) const;
  bool partitioned(std::uint64_t round, std::size_t a, std::size_t b) const;
  void send(std::size_t from, const Envelope& envelope);
  void broadcast(std::size_t from, const Message& message) { send(from, {std::nullopt, message}); }
  void deliver(std::size_t i);
  void submit_workload();
  void run_lottery();
  Transaction next_workload_tx();

  SimConfig config_;
  std::vector<Node> nodes_;
  std::vector<std::deque<InFlight>> inboxes_;
  std::mt19937_64 lottery_rng_;
  std::mt19937_64 network_rng_;
  std::mt19937_64 workload_rng_;
  std::vector<KeyPair> farmers_;
  std::uint64_t tx_counter_ = 0;
  std::uint64_t round_ = 0;
  SimResult result_;
};

SimResult run_simulation(const SimConfig& config);

/// Header plus one row per (round, node): round,node,height,mempool_size,tip_digest.
std::string metrics_csv(const SimResult& result);

}  // namespace agri

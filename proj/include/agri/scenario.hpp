#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "agri/chainstate.hpp"
#include "agri/crypto.hpp"

namespace agri {

/// Assembles a valid chain one transaction at a time. Transactions are checked
/// against the rolling state at the open block's timestamp and sealed into
/// mined blocks on demand.
class ChainBuilder {
 public:
  explicit ChainBuilder(ChainParams params = {}, std::int64_t block_spacing = 600);

  /// Stages a signed transaction. Throws Error carrying the validation code.
  Digest add(const Transaction& tx);
  /// Signs with the key's next nonce and stages.
  Digest submit(TxBody body, const KeyPair& key);
  Transaction sign(TxBody body, const KeyPair& key);

  /// Key derived from `label`, registered with `role` in the open block.
  KeyPair actor(const std::string& label, Role role);

  /// Mines the open block (possibly empty) and opens the next one.
  const Block& seal();
  /// Seals any staged transactions, then moves the open block's timestamp forward.
  void advance(std::int64_t seconds);

  std::int64_t now() const { return open_time_; }
  const ChainParams& params() const { return params_; }
  const std::vector<Block>& chain() const { return chain_; }
  /// State including staged transactions.
  const WorldState& state() const { return state_; }
  std::size_t staged() const { return staged_.size(); }
  std::size_t tx_count() const { return tx_count_; }

 private:
  ChainParams params_;
  std::int64_t spacing_;
  std::vector<Block> chain_;
  WorldState state_;
  std::vector<Transaction> staged_;
  std::int64_t open_time_;
  std::map<Digest, std::uint64_t> nonces_;
  std::size_t tx_count_ = 0;
};

struct DemoOptions {
  std::uint64_t seed = 42;
  /// Stop after exactly this many transactions.
  std::size_t target_txs = 500;
  std::uint8_t difficulty = 12;
  /// Staged transactions per block before sealing.
  std::size_t block_txs = 12;
  /// Every this many raw lots, the delivery leg breaches the cold chain (0 = never).
  std::size_t breach_every = 5;
};

struct DemoChain {
  ChainParams params;
  std::vector<Block> blocks;
  std::vector<Digest> raw_lots;
  std::vector<Digest> processed_lots;
  std::vector<Digest> shipments;
  std::map<std::string, KeyPair> keys;
};

/// Seeded end-to-end supply chain: harvests with field sensors, auctions,
/// refrigerated deliveries (some breaching), processing, resale, inspections
/// and disputes.
DemoChain build_demo(const DemoOptions& options);

}  // namespace agri

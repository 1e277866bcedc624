#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace agri {

inline constexpr std::int64_t kSecondsPerDay = 86'400;

/// Network-wide constants every node must agree on; part of consensus.
struct ChainParams {
  /// Leading zero bits required of every non-genesis block hash (also stored in genesis).
  std::uint8_t difficulty = 16;
  std::int64_t genesis_timestamp = 0;
  /// Cold-chain breach penalty as a fraction of the contract price, micro units.
  std::int64_t penalty_rate_micro = 250'000;
  /// Reputation EWMA weight of the newest event, micro units.
  std::int64_t reputation_alpha_micro = 200'000;
  /// Shelf life per processed product type, seconds.
  std::map<std::string, std::int64_t> shelf_life;
  std::int64_t default_shelf_life = 30 * kSecondsPerDay;

  std::int64_t shelf_life_of(const std::string& product_type) const {
    auto it = shelf_life.find(product_type);
    return it == shelf_life.end() ? default_shelf_life : it->second;
  }
};

}  // namespace agri

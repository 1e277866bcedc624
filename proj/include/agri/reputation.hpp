#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agri/digest.hpp"
#include "agri/transaction.hpp"

namespace agri {

inline constexpr std::int64_t kMicro = 1'000'000;
inline constexpr std::int64_t kInitialReputation = 500'000;
inline constexpr std::int64_t kDefaultReputationAlpha = 200'000;

/// Score in [0, 1] with 1e-6 resolution.
struct ReputationScore {
  std::int64_t micro = kInitialReputation;
  auto operator<=>(const ReputationScore&) const = default;
};

enum class OutcomeKind : std::uint8_t { DeliveredClean, ColdChainBreach, QualityPass, QualityFail, DisputeLost, DisputeWon };

std::int64_t outcome_weight(OutcomeKind kind);
std::string_view to_string(OutcomeKind kind);

struct OutcomeEvent {
  Digest subject;
  OutcomeKind kind = OutcomeKind::DeliveredClean;
  std::int64_t weight = 0;

  static OutcomeEvent of(const Digest& subject, OutcomeKind kind) { return {subject, kind, outcome_weight(kind)}; }
  bool operator==(const OutcomeEvent&) const = default;
};

/// Exponentially weighted moving average in exact integer arithmetic:
/// round_half_up(((1e6 - alpha) * current + alpha * weight) / 1e6).
ReputationScore update_score(ReputationScore current, const OutcomeEvent& event,
                             std::int64_t alpha_micro = kDefaultReputationAlpha);

/// What an applied transaction did, as far as scoring cares.
struct TxEffect {
  TxKind kind = TxKind::RegisterActor;
  std::optional<Digest> shipper;        // ConfirmDelivery
  bool breached = false;                // ConfirmDelivery
  std::optional<Digest> lot_owner;      // QualityCheck
  bool quality_passed = false;          // QualityCheck
  std::optional<Digest> dispute_loser;  // ResolveDispute
  std::optional<Digest> dispute_winner; // ResolveDispute
};

std::vector<OutcomeEvent> outcome_of(const TxEffect& effect);

/// Decimal rendering with six fractional digits, e.g. "0.600000".
std::string render_score(ReputationScore score);

}  // namespace agri

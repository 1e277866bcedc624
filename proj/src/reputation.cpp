#include "agri/reputation.hpp"

#include <algorithm>
#include <cstdio>

#include "agri/error.hpp"

namespace agri {

std::int64_t outcome_weight(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::DeliveredClean:
    case OutcomeKind::QualityPass:
    case OutcomeKind::DisputeWon: return kMicro;
    case OutcomeKind::ColdChainBreach:
    case OutcomeKind::QualityFail:
    case OutcomeKind::DisputeLost: return 0;
  }
  return 0;
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::DeliveredClean: return "DeliveredClean";
    case OutcomeKind::ColdChainBreach: return "ColdChainBreach";
    case OutcomeKind::QualityPass: return "QualityPass";
    case OutcomeKind::QualityFail: return "QualityFail";
    case OutcomeKind::DisputeLost: return "DisputeLost";
    case OutcomeKind::DisputeWon: return "DisputeWon";
  }
  return "";
}

ReputationScore update_score(ReputationScore current, const OutcomeEvent& event, std::int64_t alpha_micro) {
  if (alpha_micro < 0 || alpha_micro > kMicro) throw Error(ErrorCode::InvalidArgument, "alpha outside [0, 1]");
  auto current_micro = std::clamp<std::int64_t>(current.micro, 0, kMicro);
  auto weight = std::clamp<std::int64_t>(event.weight, 0, kMicro);
  // Both terms are non-negative and at most 1e12, so half-up is (x + 5e5) / 1e6.
  std::int64_t numerator = (kMicro - alpha_micro) * current_micro + alpha_micro * weight;
  return ReputationScore{(numerator + kMicro / 2) / kMicro};
}

std::vector<OutcomeEvent> outcome_of(const TxEffect& effect) {
  std::vector<OutcomeEvent> events;
  switch (effect.kind) {
    case TxKind::ConfirmDelivery:
      if (effect.shipper)
        events.push_back(OutcomeEvent::of(*effect.shipper,
                                          effect.breached ? OutcomeKind::ColdChainBreach : OutcomeKind::DeliveredClean));
      break;
    case TxKind::QualityCheck:
      if (effect.lot_owner)
        events.push_back(OutcomeEvent::of(*effect.lot_owner,
                                          effect.quality_passed ? OutcomeKind::QualityPass : OutcomeKind::QualityFail));
      break;
    case TxKind::ResolveDispute:
      if (effect.dispute_loser) events.push_back(OutcomeEvent::of(*effect.dispute_loser, OutcomeKind::DisputeLost));
      if (effect.dispute_winner) events.push_back(OutcomeEvent::of(*effect.dispute_winner, OutcomeKind::DisputeWon));
      break;
    default: break;
  }
  return events;
}

std::string render_score(ReputationScore score) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%06lld", static_cast<long long>(score.micro / kMicro),
                static_cast<long long>(score.micro % kMicro));
  return buf;
}

}  // namespace agri

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agri {

enum class ErrorCode {
  Ok,
  // encoding
  Malformed,
  // ledger
  EmptyChain,
  NonceExhausted,
  TxNotInBlock,
  InvalidArgument,
  // chainstate
  BadSignature,
  UnknownSigner,
  RoleForbidden,
  AlreadyRegistered,
  DuplicateTransaction,
  UnknownActor,
  UnknownLot,
  UnknownAuction,
  UnknownShipment,
  UnknownDispute,
  NotOwner,
  InvalidLotState,
  InvalidQuantity,
  InvalidReading,
  NotParticipant,
  // contracts
  AuctionClosed,
  AuctionNotOpen,
  BidTooLow,
  SelfBid,
  NotYetClosable,
  InvalidAuctionWindow,
  WrongMetric,
  NotFinal,
  InvalidShipmentState,
  DisputeClosed,
  // replay
  InvalidChain,
  InvalidTransaction,
  // traceability
  HeightOutOfRange,
  // network
  NoCandidates,
  // service
  NotChild,
  IoFailure,
  CorruptLog,
  QueueFull,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  explicit Error(ErrorCode code, const std::string& message = {});

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Outcome of a validation step: Ok, or an error code with a human readable reason.
struct Status {
  ErrorCode code = ErrorCode::Ok;
  std::string message;

  bool ok() const noexcept { return code == ErrorCode::Ok; }
  static Status success() { return {}; }
  static Status fail(ErrorCode c, std::string msg = {}) { return {c, std::move(msg)}; }
};

}  // namespace agri

#include "agri/error.hpp"

namespace agri {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::EmptyChain: return "EmptyChain";
    case ErrorCode::NonceExhausted: return "NonceExhausted";
    case ErrorCode::TxNotInBlock: return "TxNotInBlock";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BadSignature: return "BadSignature";
    case ErrorCode::UnknownSigner: return "UnknownSigner";
    case ErrorCode::RoleForbidden: return "RoleForbidden";
    case ErrorCode::AlreadyRegistered: return "AlreadyRegistered";
    case ErrorCode::DuplicateTransaction: return "DuplicateTransaction";
    case ErrorCode::UnknownActor: return "UnknownActor";
    case ErrorCode::UnknownLot: return "UnknownLot";
    case ErrorCode::UnknownAuction: return "UnknownAuction";
    case ErrorCode::UnknownShipment: return "UnknownShipment";
    case ErrorCode::UnknownDispute: return "UnknownDispute";
    case ErrorCode::NotOwner: return "NotOwner";
    case ErrorCode::InvalidLotState: return "InvalidLotState";
    case ErrorCode::InvalidQuantity: return "InvalidQuantity";
    case ErrorCode::InvalidReading: return "InvalidReading";
    case ErrorCode::NotParticipant: return "NotParticipant";
    case ErrorCode::AuctionClosed: return "AuctionClosed";
    case ErrorCode::AuctionNotOpen: return "AuctionNotOpen";
    case ErrorCode::BidTooLow: return "BidTooLow";
    case ErrorCode::SelfBid: return "SelfBid";
    case ErrorCode::NotYetClosable: return "NotYetClosable";
    case ErrorCode::InvalidAuctionWindow: return "InvalidAuctionWindow";
    case ErrorCode::WrongMetric: return "WrongMetric";
    case ErrorCode::NotFinal: return "NotFinal";
    case ErrorCode::InvalidShipmentState: return "InvalidShipmentState";
    case ErrorCode::DisputeClosed: return "DisputeClosed";
    case ErrorCode::InvalidChain: return "InvalidChain";
    case ErrorCode::InvalidTransaction: return "InvalidTransaction";
    case ErrorCode::HeightOutOfRange: return "HeightOutOfRange";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::NotChild: return "NotChild";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::CorruptLog: return "CorruptLog";
    case ErrorCode::QueueFull: return "QueueFull";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message) {
  std::string out(to_string(code));
  if (!message.empty()) {
    out += ": ";
    out += message;
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(format_message(code, message)), code_(code) {}

}  // namespace agri

#include "texterial/error.hpp"

namespace texterial {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BlankInput: return "BlankInput";
    case ErrorCode::NoCollision: return "NoCollision";
    case ErrorCode::NoTarget: return "NoTarget";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::MisalignedRange: return "MisalignedRange";
    case ErrorCode::EmptyCompletion: return "EmptyCompletion";
    case ErrorCode::MissingSlot: return "MissingSlot";
    case ErrorCode::UnknownTemplate: return "UnknownTemplate";
    case ErrorCode::ProviderTimeout: return "ProviderTimeout";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::LengthViolation: return "LengthViolation";
    case ErrorCode::CardinalityViolation: return "CardinalityViolation";
    case ErrorCode::Busy: return "Busy";
    case ErrorCode::NothingToUndo: return "NothingToUndo";
    case ErrorCode::NothingToRedo: return "NothingToRedo";
    case ErrorCode::UnknownBlock: return "UnknownBlock";
    case ErrorCode::UnknownFern: return "UnknownFern";
    case ErrorCode::UnknownLeaf: return "UnknownLeaf";
    case ErrorCode::AlreadyPruned: return "AlreadyPruned";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::SameFern: return "SameFern";
    case ErrorCode::TooFewLeaves: return "TooFewLeaves";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::HashMismatch: return "HashMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace texterial

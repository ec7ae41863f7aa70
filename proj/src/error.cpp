#include "gesture/error.hpp"

namespace gesture {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::NoPerson: return "NoPerson";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingNeck: return "MissingNeck";
    case ErrorCode::DegenerateExtent: return "DegenerateExtent";
    case ErrorCode::MissingKeypoint: return "MissingKeypoint";
    case ErrorCode::ZeroLengthRay: return "ZeroLengthRay";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonPositiveRatio: return "NonPositiveRatio";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InconsistentShapes: return "InconsistentShapes";
    case ErrorCode::EncodingMismatch: return "EncodingMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotCyclic: return "NotCyclic";
    case ErrorCode::InsufficientMinima: return "InsufficientMinima";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

std::string Error::message() const { return std::string(what()).substr(to_string(code_).size() + 2); }

Error Error::with_frame(std::size_t frame) const {
  Error e(code_, message() + " (frame " + std::to_string(frame) + ")");
  e.frame_ = frame;
  e.keypoint_ = keypoint_;
  return e;
}

Error Error::missing_keypoint(int index) {
  Error e(ErrorCode::MissingKeypoint, "keypoint " + std::to_string(index) + " is not present");
  e.keypoint_ = index;
  return e;
}

}  // namespace gesture

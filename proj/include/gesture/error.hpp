#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gesture {

enum class ErrorCode {
  MalformedJson,
  NoPerson,
  WrongArity,
  IoError,
  MissingNeck,
  DegenerateExtent,
  MissingKeypoint,
  ZeroLengthRay,
  UnknownLabel,
  TooShort,
  NonPositiveRatio,
  InvalidConfig,
  ShapeMismatch,
  LabelOutOfRange,
  NonFiniteGradient,
  EmptyDataset,
  InconsistentShapes,
  EncodingMismatch,
  LengthMismatch,
  NotCyclic,
  InsufficientMinima,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library. `frame()` is set when the failure
// happened while processing a particular frame of a sequence (0-based), and
// `keypoint()` for MissingKeypoint.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message);

  ErrorCode code() const noexcept { return code_; }
  // what() without the leading "Code: "
  std::string message() const;
  std::optional<std::size_t> frame() const noexcept { return frame_; }
  std::optional<int> keypoint() const noexcept { return keypoint_; }

  Error with_frame(std::size_t frame) const;
  static Error missing_keypoint(int index);

 private:
  ErrorCode code_;
  std::optional<std::size_t> frame_;
  std::optional<int> keypoint_;
};

}  // namespace gesture

#pragma once

#include <filesystem>
#include <optional>

#include "gesture/features.hpp"
#include "gesture/nn.hpp"

namespace gesture {

/// A trained recognizer: network weights plus the feature encoding and
/// window length they were trained for.
struct Model {
  nn::ModelConfig config;
  nn::Params params;
  Encoding encoding = Encoding::Coordinate;
  int window = 50;
};

// Weight file layout (little-endian):
//   "GPWT" | u32 version | u64 header length | header JSON | f64 tensor data
// The header lists config, seed, encoding, window, gate order, and every
// tensor's name and shape; data follows in header order, column-major.
inline constexpr std::uint32_t kWeightFileVersion = 1;

void save_model(const std::filesystem::path& path, const Model& model);

/// Throws EncodingMismatch when `expected` is given and differs from the
/// file, InvalidConfig on a config/shape disagreement, IoError on a
/// truncated or foreign file.
Model load_model(const std::filesystem::path& path,
                 std::optional<Encoding> expected = std::nullopt);

}  // namespace gesture

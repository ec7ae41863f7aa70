#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "gesture/features.hpp"
#include "gesture/skeleton.hpp"

namespace gesture {

/// Characteristic start pose of each cyclic gesture, in one feature encoding.
struct StartPositionTable {
  Encoding encoding = Encoding::Coordinate;
  std::map<GestureLabel, FeatureVector> positions;

  /// JSON: {"encoding": "...", "positions": {"Label": [f, ...], ...}}
  static StartPositionTable load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

struct SpeedEstimate {
  int period_frames = 0;
  double cycles_per_second = 0.0;
  std::vector<std::size_t> minima_indices;
};

/// Euclidean distance of every frame to `reference`.
std::vector<double> distance_series(std::span<const FeatureVector> window, const FeatureVector& reference);

/// Indices i in [radius, len - radius) whose value is <= every neighbour
/// within `radius` and < at least one of them. A run of equal qualifying
/// values reports only its first index. Throws TooShort if len <= 2 * radius.
std::vector<std::size_t> local_minima(std::span<const double> series, int radius);

/// Default neighbourhood radius. Smaller radii pick up noise dips near the
/// flat maximum of the coordinate distance curve; periods must exceed it.
inline constexpr int kDefaultMinimaRadius = 6;

/// Period = distance between the first two minima of the distance series.
/// Throws NotCyclic when the label has no start position, and
/// InsufficientMinima when fewer than two minima are found.
SpeedEstimate estimate_speed(std::span<const FeatureVector> window, GestureLabel label,
                             const StartPositionTable& table, double fps, int radius = kDefaultMinimaRadius);

}  // namespace gesture

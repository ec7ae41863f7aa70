#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>

#include "gesture/skeleton.hpp"

namespace gesture {

inline constexpr int kDepthKeypoints = 6;  // keypoints 2..7
using DepthRow = std::array<double, kDepthKeypoints>;

/// Per-gesture pseudo-depths of keypoints 2..7, in shoulder widths relative
/// to the neck (positive = away from the camera).
class DepthTable {
 public:
  DepthTable() = default;
  explicit DepthTable(std::map<GestureLabel, DepthRow> rows);

  /// Throws UnknownLabel when the gesture has no row.
  const DepthRow& row(GestureLabel label) const;
  const std::map<GestureLabel, DepthRow>& rows() const noexcept { return rows_; }

  /// Whitespace separated `Label d2 d3 d4 d5 d6 d7` lines, '#' starts a
  /// comment. Every gesture must appear exactly once.
  static DepthTable parse(std::istream& in);
  static DepthTable load(const std::filesystem::path& path);
  /// The table shipped in config/depths.txt.
  static DepthTable defaults();

 private:
  std::map<GestureLabel, DepthRow> rows_;
};

/// Rotation about the vertical axis through the neck. Positive angles turn
/// the subject so that keypoint 2 (BODY-25 right shoulder, image left when
/// facing the camera) moves toward the camera.
struct RotationSpec {
  double angle_deg = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};
using Skeleton3 = std::array<Point3, kBody25Size>;

/// Neck-relative pseudo-3D skeleton. z = depth * shoulder width for 2..7,
/// zero elsewhere. Throws MissingKeypoint for the neck or any of 2..7.
Skeleton3 lift_pose(const Pose& pose, const DepthRow& depths);
Skeleton3 rotate_vertical(const Skeleton3& points, double angle_deg);

/// Lift, rotate, and drop z. y and confidences are copied unchanged.
Pose rotate_pose(const Pose& pose, const DepthRow& depths, RotationSpec spec);
Sequence rotate_sequence(const Sequence& seq, const DepthTable& table, RotationSpec spec);

/// Simulates execution at `ratio` x the recorded speed by linear
/// interpolation between frames; round(len / ratio) output frames, minimum 2.
Sequence resample_speed(const Sequence& seq, double ratio);

/// round-half-away-from-zero, at least 2.
int resampled_length(std::size_t len, double ratio);

}  // namespace gesture

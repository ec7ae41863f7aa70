#pragma once

#include <array>

#include "gesture/skeleton.hpp"

namespace gesture {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Upper-body keypoints 0..8 after 1x1 normalization. Coordinates of points
/// with present[i] == false are unspecified.
struct NormalizedPose {
  std::array<Point2, kUpperBodySize> points{};
  std::array<bool, kUpperBodySize> present{};
};

/// Shifts the neck to the origin, then scales x and y independently so the
/// present upper-body points span exactly 1 in each axis.
///
/// Throws MissingNeck when keypoint 1 is absent and DegenerateExtent when the
/// present points have zero width or zero height.
NormalizedPose normalize_1x1(const Pose& pose);

/// Reinterprets normalized points as pixel coordinates (confidence 1 for
/// present points, 0 otherwise). Keypoints 9..24 are left missing.
Pose embed(const NormalizedPose& np);

}  // namespace gesture

#include "gesture/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gesture/error.hpp"

namespace gesture {

NormalizedPose normalize_1x1(const Pose& pose) {
  const Keypoint& neck = pose[kp::Neck];
  if (!neck.present()) throw Error(ErrorCode::MissingNeck, "neck keypoint (1) is missing");

  NormalizedPose out;
  double min_x = std::numeric_limits<double>::infinity();
  double max_x = -min_x;
  double min_y = min_x;
  double max_y = -min_x;
  for (int i = 0; i < kUpperBodySize; ++i) {
    const Keypoint& k = pose[i];
    if (!k.present()) continue;
    const Point2 shifted{k.x - neck.x, k.y - neck.y};
    out.points[i] = shifted;
    out.present[i] = true;
    min_x = std::min(min_x, shifted.x);
    max_x = std::max(max_x, shifted.x);
    min_y = std::min(min_y, shifted.y);
    max_y = std::max(max_y, shifted.y);
  }
  const double width = max_x - min_x;
  const double height = max_y - min_y;
  if (!(width > 0.0) || !(height > 0.0)) {
    throw Error(ErrorCode::DegenerateExtent, "upper-body keypoints have zero width or height");
  }
  const double sx = 1.0 / width;
  const double sy = 1.0 / height;
  if (!std::isfinite(sx) || !std::isfinite(sy)) {
    throw Error(ErrorCode::DegenerateExtent, "upper-body extent too small to scale");
  }
  for (int i = 0; i < kUpperBodySize; ++i) {
    if (!out.present[i]) continue;
    out.points[i].x *= sx;
    out.points[i].y *= sy;
  }
  return out;
}

Pose embed(const NormalizedPose& np) {
  Pose pose;
  for (int i = 0; i < kUpperBodySize; ++i) {
    if (np.present[i]) pose[i] = Keypoint{np.points[i].x, np.points[i].y, 1.0};
  }
  return pose;
}

}  // namespace gesture

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gesture/normalize.hpp"
#include "gesture/skeleton.hpp"

namespace gesture {

enum class Encoding { Coordinate, Angle };

std::string_view to_string(Encoding encoding);
Encoding parse_encoding(std::string_view name);

inline constexpr int kCoordinateDim = 2 * kUpperBodySize;
inline constexpr int kAngleDim = 5;
int feature_dim(Encoding encoding);

struct FeatureVector {
  std::vector<double> values;
  Encoding encoding = Encoding::Coordinate;
};

/// (a, vertex, b) triples for the five joint angles; the vertex is the middle id.
struct AngleTriple {
  int a;
  int vertex;
  int b;
};
inline constexpr std::array<AngleTriple, kAngleDim> kAngleSpec = {{
    {2, 3, 4},  // elbow, arm 2-4
    {5, 6, 7},  // elbow, arm 5-7
    {1, 2, 3},  // shoulder 2
    {1, 5, 6},  // shoulder 5
    {0, 1, 8},  // neck
}};

/// [x0, y0, x1, y1, ..., x8, y8]. Throws MissingKeypoint if any of 0..8 is absent.
FeatureVector encode_coordinates(const NormalizedPose& np);

/// Unsigned angle between rays vertex->a and vertex->b, in degrees [0, 180].
double angle_at(Point2 a, Point2 vertex, Point2 b);

/// Each of the five joint angles divided by 180.
FeatureVector encode_angles(const std::array<Point2, kUpperBodySize>& points,
                            const std::array<bool, kUpperBodySize>& present);

/// Angles taken on the raw (origin-shifted, unscaled) keypoints of `pose`.
FeatureVector encode_angles(const Pose& pose);

/// Full per-frame pipeline: coordinate -> normalize_1x1 + encode_coordinates,
/// angle -> encode_angles on the raw pose.
FeatureVector encode_frame(const Pose& pose, Encoding encoding);

/// Encodes every frame; rows are time steps. Errors carry the frame index.
Eigen::MatrixXd encode_sequence(const Sequence& seq, Encoding encoding);

// Per-window feature cache, one JSON object per line:
// {"label": ..., "encoding": ..., "frames": [[f x d] x T]}
struct CachedWindow {
  std::optional<GestureLabel> label;
  Encoding encoding = Encoding::Coordinate;
  Eigen::MatrixXd frames;
};

void write_feature_cache(const std::filesystem::path& path, const std::vector<CachedWindow>& windows);
std::vector<CachedWindow> read_feature_cache(const std::filesystem::path& path);

}  // namespace gesture

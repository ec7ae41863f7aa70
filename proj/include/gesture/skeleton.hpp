#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gesture {

inline constexpr int kBody25Size = 25;
inline constexpr int kUpperBodySize = 9;  // BODY-25 ids 0..8

// BODY-25 ids used by the arm pipeline.
namespace kp {
inline constexpr int Nose = 0;
inline constexpr int Neck = 1;
inline constexpr int RShoulder = 2;
inline constexpr int RElbow = 3;
inline constexpr int RWrist = 4;
inline constexpr int LShoulder = 5;
inline constexpr int LElbow = 6;
inline constexpr int LWrist = 7;
inline constexpr int MidHip = 8;
}  // namespace kp

/// One detected keypoint in image coordinates (x right, y down, pixels).
/// confidence == 0 marks a missing detection; its x/y must not be used.
struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  bool present() const noexcept { return confidence > 0.0; }
  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct Pose {
  std::array<Keypoint, kBody25Size> keypoints{};

  const Keypoint& operator[](int i) const { return keypoints[static_cast<std::size_t>(i)]; }
  Keypoint& operator[](int i) { return keypoints[static_cast<std::size_t>(i)]; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

enum class GestureLabel {
  RightHandLeftCircle,
  RightHandRightCircle,
  StandStill,
  LeftHandWave,
  RightHandWave,
  CallToPass,
  LeftHandRightCircle,
  LeftHandLeftCircle,
};

inline constexpr int kNumGestures = 8;

inline constexpr std::array<GestureLabel, kNumGestures> kAllGestures = {
    GestureLabel::RightHandLeftCircle, GestureLabel::RightHandRightCircle,
    GestureLabel::StandStill,          GestureLabel::LeftHandWave,
    GestureLabel::RightHandWave,       GestureLabel::CallToPass,
    GestureLabel::LeftHandRightCircle, GestureLabel::LeftHandLeftCircle,
};

std::string_view to_string(GestureLabel label);
/// Throws Error(UnknownLabel) for names outside the vocabulary.
GestureLabel parse_label(std::string_view name);
inline int class_index(GestureLabel label) { return static_cast<int>(label); }
GestureLabel label_from_index(int index);

struct Sequence {
  std::vector<Pose> frames;
  double fps = 30.0;
  std::optional<GestureLabel> label;
  std::optional<double> view_angle_deg;

  std::size_t size() const noexcept { return frames.size(); }
};

/// Parses one OpenPose per-frame JSON document and returns the first person.
Pose parse_openpose_frame(std::string_view json_text);

/// Loads OpenPose output: either a directory of per-frame JSON files (sorted
/// by filename) or a JSONL file with one OpenPose document per line.
Sequence load_sequence(const std::filesystem::path& path, double fps);

// Artifact JSONL format: line 1 is {fps, label?, view_angle_deg?}, each
// further line is {"kp": [[x, y, c] x 25]}.
void write_sequence(std::ostream& out, const Sequence& seq);
void write_sequence(const std::filesystem::path& path, const Sequence& seq);
Sequence read_sequence(std::istream& in);
Sequence read_sequence(const std::filesystem::path& path);

/// All *.jsonl files directly inside `dir`, sorted by filename.
std::vector<std::filesystem::path> list_sequence_files(const std::filesystem::path& dir);

}  // namespace gesture

#include "gesture/augment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "gesture/error.hpp"

namespace gesture {

namespace {

constexpr const char* kDefaultDepths = R"(
StandStill               0     0.1  -0.1   0     0.1  -0.1
LeftHandWave             0    -0.4  -0.4   0     0.1  -0.1
LeftHandLeftCircle       0    -0.1  -0.1   0     0.1  -0.1
RightHandWave            0     0.1  -0.1   0    -0.4  -0.4
RightHandLeftCircle      0     0.1  -0.1   0    -0.1  -0.1
RightHandRightCircle     0     0.1  -0.1   0    -0.1  -0.1
LeftHandRightCircle      0    -0.1  -0.1   0     0.1  -0.1
CallToPass               0     0     0     0    -0.3  -0.4
)";

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

DepthTable::DepthTable(std::map<GestureLabel, DepthRow> rows) : rows_(std::move(rows)) {}

const DepthRow& DepthTable::row(GestureLabel label) const {
  const auto it = rows_.find(label);
  if (it == rows_.end()) {
    throw Error(ErrorCode::UnknownLabel, "no depth row for " + std::string(to_string(label)));
  }
  return it->second;
}

DepthTable DepthTable::parse(std::istream& in) {
  std::map<GestureLabel, DepthRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    const GestureLabel label = parse_label(name);
    DepthRow row{};
    for (double& d : row) {
      if (!(fields >> d)) {
        throw Error(ErrorCode::InvalidConfig,
                    "depth table line " + std::to_string(line_no) + ": expected 6 values");
      }
    }
    std::string extra;
    if (fields >> extra) {
      throw Error(ErrorCode::InvalidConfig,
                  "depth table line " + std::to_string(line_no) + ": too many values");
    }
    if (!rows.emplace(label, row).second) {
      throw Error(ErrorCode::InvalidConfig, "duplicate depth row for " + name);
    }
  }
  for (GestureLabel g : kAllGestures) {
    if (!rows.contains(g)) {
      throw Error(ErrorCode::InvalidConfig, "depth table lacks " + std::string(to_string(g)));
    }
  }
  return DepthTable(std::move(rows));
}

DepthTable DepthTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse(in);
}

DepthTable DepthTable::defaults() {
  std::istringstream in(kDefaultDepths);
  return parse(in);
}

Skeleton3 lift_pose(const Pose& pose, const DepthRow& depths) {
  const Keypoint& neck = pose[kp::Neck];
  if (!neck.present()) throw Error::missing_keypoint(kp::Neck);
  for (int i = kp::RShoulder; i <= kp::LWrist; ++i) {
    if (!pose[i].present()) throw Error::missing_keypoint(i);
  }
  const double shoulder_width = std::hypot(pose[kp::LShoulder].x - pose[kp::RShoulder].x,
                                           pose[kp::LShoulder].y - pose[kp::RShoulder].y);
  Skeleton3 out{};
  for (int i = 0; i < kBody25Size; ++i) {
    auto& p = out[static_cast<std::size_t>(i)];
    p.x = pose[i].x - neck.x;
    p.y = pose[i].y - neck.y;
    if (i >= kp::RShoulder && i <= kp::LWrist) {
      p.z = depths[static_cast<std::size_t>(i - kp::RShoulder)] * shoulder_width;
    }
  }
  return out;
}

Skeleton3 rotate_vertical(const Skeleton3& points, double angle_deg) {
  const double c = std::cos(radians(angle_deg));
  const double s = std::sin(radians(angle_deg));
  Skeleton3 out{};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point3& p = points[i];
    out[i] = Point3{p.x * c - p.z * s, p.y, p.x * s + p.z * c};
  }
  return out;
}

Pose rotate_pose(const Pose& pose, const DepthRow& depths, RotationSpec spec) {
  if (!(std::abs(spec.angle_deg) <= 90.0)) {
    throw Error(ErrorCode::InvalidConfig, "rotation angle must be within [-90, 90] degrees");
  }
  const Skeleton3 rotated = rotate_vertical(lift_pose(pose, depths), spec.angle_deg);
  const double neck_x = pose[kp::Neck].x;
  Pose out = pose;
  for (int i = 0; i < kBody25Size; ++i) {
    if (!pose[i].present()) continue;
    out[i].x = neck_x + rotated[static_cast<std::size_t>(i)].x;
  }
  return out;
}

Sequence rotate_sequence(const Sequence& seq, const DepthTable& table, RotationSpec spec) {
  if (!seq.label) throw Error(ErrorCode::UnknownLabel, "sequence has no label for depth lookup");
  const DepthRow& depths = table.row(*seq.label);
  Sequence out = seq;
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    try {
      out.frames[t] = rotate_pose(seq.frames[t], depths, spec);
    } catch (const Error& e) {
      throw e.with_frame(t);
    }
  }
  out.view_angle_deg = spec.angle_deg;
  return out;
}

int resampled_length(std::size_t len, double ratio) {
  const double raw = std::round(static_cast<double>(len) / ratio);  // half away from zero
  return std::max(2, static_cast<int>(raw));
}

Sequence resample_speed(const Sequence& seq, double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw Error(ErrorCode::NonPositiveRatio, "speed ratio must be positive");
  }
  const std::size_t len = seq.frames.size();
  if (len < 2) throw Error(ErrorCode::TooShort, "resampling needs at least 2 frames");

  const int out_len = resampled_length(len, ratio);
  Sequence out = seq;
  out.frames.assign(static_cast<std::size_t>(out_len), Pose{});
  const double last = static_cast<double>(len - 1);
  for (int j = 0; j < out_len; ++j) {
    const double t = static_cast<double>(j) * last / static_cast<double>(out_len - 1);
    const auto i0 = std::min(static_cast<std::size_t>(std::floor(t)), len - 1);
    const double frac = t - static_cast<double>(i0);
    Pose& dst = out.frames[static_cast<std::size_t>(j)];
    if (frac == 0.0) {
      dst = seq.frames[i0];
      continue;
    }
    const Pose& a = seq.frames[i0];
    const Pose& b = seq.frames[i0 + 1];
    for (int k = 0; k < kBody25Size; ++k) {
      if (!a[k].present() || !b[k].present()) continue;  // stays missing
      dst[k] = Keypoint{a[k].x + frac * (b[k].x - a[k].x), a[k].y + frac * (b[k].y - a[k].y),
                        std::min(a[k].confidence, b[k].confidence)};
    }
  }
  return out;
}

}  // namespace gesture

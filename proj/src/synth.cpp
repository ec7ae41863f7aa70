#include "gesture/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gesture/error.hpp"
#include "gesture/parallel.hpp"

namespace gesture {

namespace {

constexpr double kUpperArm = 0.5;  // in shoulder widths
constexpr double kForearm = 0.5;
constexpr double kCircleRadius = 0.6;
constexpr double kWaveAmplitude = 0.5;

struct Vec {
  double x;
  double y;
};

enum class Arm { Left, Right };  // image side: Left = keypoints 2..4

struct ArmIds {
  int shoulder, elbow, wrist;
  double outward;  // sign of x pointing away from the torso
};

ArmIds ids(Arm arm) {
  return arm == Arm::Left ? ArmIds{kp::RShoulder, kp::RElbow, kp::RWrist, -1.0}
                          : ArmIds{kp::LShoulder, kp::LElbow, kp::LWrist, 1.0};
}

// Two-bone IK. The elbow always bends with the same handedness relative to
// the shoulder-wrist direction (outward when the wrist is raised), so it
// never jumps sides while the wrist circles the shoulder.
Vec place_elbow(Vec shoulder, Vec wrist, double outward, double scale) {
  const double l1 = kUpperArm * scale;
  const double l2 = kForearm * scale;
  const double dx = wrist.x - shoulder.x;
  const double dy = wrist.y - shoulder.y;
  double d = std::hypot(dx, dy);
  const Vec u{dx / d, dy / d};
  d = std::clamp(d, std::abs(l1 - l2), l1 + l2);
  const double a = (l1 * l1 - l2 * l2 + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, l1 * l1 - a * a));
  const Vec n{-outward * u.y, outward * u.x};
  return Vec{shoulder.x + a * u.x + h * n.x, shoulder.y + a * u.y + h * n.y};
}

bool is_cyclic(GestureLabel g) { return g != GestureLabel::StandStill; }

void validate(const SynthConfig& c) {
  const auto fail = [](const char* what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (c.n_frames < 1) fail("n_frames must be positive");
  if (!(c.fps > 0.0)) fail("fps must be positive");
  if (is_cyclic(c.gesture) && c.period_frames < 4) fail("period_frames must be at least 4");
  if (!(c.noise_sigma >= 0.0)) fail("noise_sigma must be non-negative");
  if (!(c.subject_scale > 0.0)) fail("subject_scale must be positive");
  if (!(c.phase >= 0.0 && c.phase < 1.0)) fail("phase must be in [0, 1)");
  if (!(c.drop_prob >= 0.0 && c.drop_prob < 1.0)) fail("drop_prob must be in [0, 1)");
}

// Position inside the cycle, in frames, for frame j. Integer arithmetic for
// phase 0 keeps the clockwise and counter-clockwise grids bitwise identical.
double cycle_position(const SynthConfig& c, int frame, int direction) {
  const double period = c.period_frames;
  double pos = std::fmod(c.phase * period + direction * static_cast<double>(frame), period);
  if (pos < 0.0) pos += period;
  return pos;
}

Pose base_pose(double scale, double ox, double oy) {
  Pose pose;
  const auto put = [&](int id, double x, double y) { pose[id] = Keypoint{ox + x * scale, oy + y * scale, 1.0}; };
  put(kp::Nose, 0.0, -0.45);
  put(kp::Neck, 0.0, 0.0);
  put(kp::RShoulder, -0.5, 0.0);
  put(kp::LShoulder, 0.5, 0.0);
  put(kp::MidHip, 0.0, 1.5);
  return pose;
}

// Wrist offset from the shoulder in shoulder widths, with x measured outward.
void set_arm(Pose& pose, Arm arm, Vec wrist_rel, double scale) {
  const ArmIds a = ids(arm);
  const Vec s{pose[a.shoulder].x, pose[a.shoulder].y};
  const Vec w{s.x + a.outward * wrist_rel.x * scale, s.y + wrist_rel.y * scale};
  const Vec e = place_elbow(s, w, a.outward, scale);
  pose[a.elbow] = Keypoint{e.x, e.y, 1.0};
  pose[a.wrist] = Keypoint{w.x, w.y, 1.0};
}

constexpr Vec kArmDown{0.0, kUpperArm + kForearm};
constexpr Vec kArmOut{kUpperArm + kForearm, 0.0};

Vec circle_wrist(Arm arm, double angle) {
  // angle is in image space, so both arms share the clockwise sense;
  // convert x to the outward frame of the arm
  const double x = kCircleRadius * std::cos(angle);
  const double y = kCircleRadius * std::sin(angle);
  return Vec{ids(arm).outward * x, y};
}

Pose gesture_pose(const SynthConfig& c, int frame) {
  const double w = c.subject_scale;
  Pose pose = base_pose(w, c.offset_x, c.offset_y);
  // Radians travelled through the cycle; 0 at the start pose.
  const auto cycle_angle = [&](int direction) {
    return 2.0 * std::numbers::pi * cycle_position(c, frame, direction) / c.period_frames;
  };
  // Circles start with the elbow straight out from the shoulder, the one
  // point of the cycle where the shoulder angle peaks.
  const double elbow_lead = std::acos(0.5 * kCircleRadius / kUpperArm);
  const auto circle_angle = [&](Arm arm, int direction) {
    const double start = arm == Arm::Right ? -elbow_lead : std::numbers::pi + elbow_lead;
    return start + cycle_angle(direction);
  };
  // Waves and the beckon start at an extreme so the start pose recurs once per cycle.
  const auto wave = [&]() { return Vec{0.4, -0.35 - kWaveAmplitude * std::cos(cycle_angle(1))}; };
  switch (c.gesture) {
    case GestureLabel::StandStill:
      set_arm(pose, Arm::Left, kArmDown, w);
      set_arm(pose, Arm::Right, kArmDown, w);
      break;
    case GestureLabel::LeftHandWave:
      set_arm(pose, Arm::Left, wave(), w);
      set_arm(pose, Arm::Right, kArmDown, w);
      break;
    case GestureLabel::RightHandWave:
      set_arm(pose, Arm::Left, kArmDown, w);
      set_arm(pose, Arm::Right, wave(), w);
      break;
    case GestureLabel::CallToPass: {
      set_arm(pose, Arm::Left, kArmOut, w);
      set_arm(pose, Arm::Right, Vec{0.1 + 0.35 * std::cos(cycle_angle(1)), 0.45}, w);
      break;
    }
    case GestureLabel::LeftHandRightCircle:  // clockwise
      set_arm(pose, Arm::Left, circle_wrist(Arm::Left, circle_angle(Arm::Left, 1)), w);
      set_arm(pose, Arm::Right, kArmDown, w);
      break;
    case GestureLabel::LeftHandLeftCircle:  // counter-clockwise
      set_arm(pose, Arm::Left, circle_wrist(Arm::Left, circle_angle(Arm::Left, -1)), w);
      set_arm(pose, Arm::Right, kArmDown, w);
      break;
    case GestureLabel::RightHandRightCircle:
      set_arm(pose, Arm::Left, kArmDown, w);
      set_arm(pose, Arm::Right, circle_wrist(Arm::Right, circle_angle(Arm::Right, 1)), w);
      break;
    case GestureLabel::RightHandLeftCircle:
      set_arm(pose, Arm::Left, kArmDown, w);
      set_arm(pose, Arm::Right, circle_wrist(Arm::Right, circle_angle(Arm::Right, -1)), w);
      break;
  }
  return pose;
}

}  // namespace

Sequence generate(const SynthConfig& config) {
  validate(config);
  Sequence seq;
  seq.fps = config.fps;
  seq.label = config.gesture;
  seq.frames.reserve(static_cast<std::size_t>(config.n_frames));
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int j = 0; j < config.n_frames; ++j) {
    Pose pose = gesture_pose(config, j);
    for (int i = 0; i < kUpperBodySize; ++i) {
      if (config.noise_sigma > 0.0) {
        pose[i].x += config.noise_sigma * noise(rng);
        pose[i].y += config.noise_sigma * noise(rng);
      }
      if (config.drop_prob > 0.0 && coin(rng) < config.drop_prob) pose[i] = Keypoint{};
    }
    seq.frames.push_back(pose);
  }
  return seq;
}

SynthJitter fixed_jitter(const SynthConfig& base) {
  SynthJitter j;
  j.period_min = j.period_max = base.period_frames;
  j.scale_min = j.scale_max = base.subject_scale;
  j.offset_x_min = j.offset_x_max = base.offset_x;
  j.offset_y_min = j.offset_y_max = base.offset_y;
  j.noise_frac_min = j.noise_frac_max = base.noise_sigma / base.subject_scale;
  j.phase_min = j.phase_max = base.phase;
  return j;
}

std::vector<Sequence> generate_dataset(int per_class, const SynthConfig& base,
                                       const SynthJitter& jitter) {
  if (per_class < 1) throw Error(ErrorCode::InvalidConfig, "per_class must be at least 1");
  if (jitter.period_min > jitter.period_max || jitter.scale_min > jitter.scale_max ||
      jitter.offset_x_min > jitter.offset_x_max || jitter.offset_y_min > jitter.offset_y_max ||
      jitter.noise_frac_min > jitter.noise_frac_max || jitter.phase_min > jitter.phase_max) {
    throw Error(ErrorCode::InvalidConfig, "jitter range with min > max");
  }
  std::mt19937_64 rng(base.seed);
  const auto uniform = [&rng](double lo, double hi) {
    return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  std::vector<SynthConfig> configs;
  for (GestureLabel g : kAllGestures) {
    for (int k = 0; k < per_class; ++k) {
      SynthConfig c = base;
      c.gesture = g;
      c.period_frames = std::uniform_int_distribution<int>(jitter.period_min, jitter.period_max)(rng);
      c.subject_scale = uniform(jitter.scale_min, jitter.scale_max);
      c.offset_x = uniform(jitter.offset_x_min, jitter.offset_x_max);
      c.offset_y = uniform(jitter.offset_y_min, jitter.offset_y_max);
      c.noise_sigma = uniform(jitter.noise_frac_min, jitter.noise_frac_max) * c.subject_scale;
      c.phase = uniform(jitter.phase_min, jitter.phase_max);
      c.phase -= std::floor(c.phase);
      c.seed = rng();
      validate(c);
      configs.push_back(c);
    }
  }
  std::vector<Sequence> out(configs.size());
  parallel_for(configs.size(), [&](std::size_t i) { out[i] = generate(configs[i]); });
  return out;
}

Pose t_pose(double subject_scale, double offset_x, double offset_y) {
  Pose pose = base_pose(subject_scale, offset_x, offset_y);
  set_arm(pose, Arm::Left, kArmOut, subject_scale);
  set_arm(pose, Arm::Right, kArmOut, subject_scale);
  return pose;
}

StartPositionTable default_start_positions(Encoding encoding, const SynthConfig& base) {
  StartPositionTable table;
  table.encoding = encoding;
  for (GestureLabel g : kAllGestures) {
    if (!is_cyclic(g)) continue;
    SynthConfig c = base;
    c.gesture = g;
    c.n_frames = 1;
    c.noise_sigma = 0.0;
    c.phase = 0.0;
    c.drop_prob = 0.0;
    table.positions[g] = encode_frame(generate(c).frames.front(), encoding);
  }
  return table;
}

Pose mirror_pose(const Pose& pose) {
  const double axis = pose[kp::Neck].x;
  Pose out = pose;
  for (int i = 0; i < kBody25Size; ++i) {
    if (out[i].present()) out[i].x = 2.0 * axis - out[i].x;
  }
  for (int i = 0; i < 3; ++i) std::swap(out[kp::RShoulder + i], out[kp::LShoulder + i]);
  return out;
}

}  // namespace gesture

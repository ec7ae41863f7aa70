#pragma once

#include <cstdint>
#include <vector>

#include "gesture/features.hpp"
#include "gesture/skeleton.hpp"
#include "gesture/speed.hpp"

namespace gesture {

// Synthetic arm-gesture generator. The figure faces the camera; "left" and
// "right" in gesture names refer to the image side, so the Left* gestures
// move keypoints 2..4 and the Right* gestures move 5..7 (the same indexing
// the default depth table uses). Circle directions are as seen in the image.
struct SynthConfig {
  GestureLabel gesture = GestureLabel::StandStill;
  int n_frames = 50;
  double fps = 30.0;
  int period_frames = 30;
  double noise_sigma = 0.0;     // pixels, per coordinate per frame
  double subject_scale = 100.0; // shoulder width, pixels
  double offset_x = 320.0;      // neck position, pixels
  double offset_y = 180.0;
  double phase = 0.0;           // start of the cycle, fraction of a period in [0, 1)
  double drop_prob = 0.0;       // chance of zeroing a keypoint's confidence
  std::uint64_t seed = 1;
};

/// Throws InvalidConfig for non-positive sizes, period < 4, negative noise
/// or a phase / drop probability outside [0, 1).
Sequence generate(const SynthConfig& config);

/// Uniform ranges sampled per sequence. Noise is a fraction of subject_scale;
/// sampled phases are taken modulo 1.
struct SynthJitter {
  int period_min = 30, period_max = 30;
  double scale_min = 100.0, scale_max = 100.0;
  double offset_x_min = 320.0, offset_x_max = 320.0;
  double offset_y_min = 180.0, offset_y_max = 180.0;
  double noise_frac_min = 0.0, noise_frac_max = 0.0;
  double phase_min = 0.0, phase_max = 0.0;
};

/// A jitter that keeps every field of `base`.
SynthJitter fixed_jitter(const SynthConfig& base);

/// `per_class` sequences for each gesture in kAllGestures order. Parameters
/// and per-sequence seeds are drawn from `base.seed`.
std::vector<Sequence> generate_dataset(int per_class, const SynthConfig& base,
                                       const SynthJitter& jitter);

/// Both arms stretched out horizontally.
Pose t_pose(double subject_scale, double offset_x, double offset_y);

/// Reflects a pose about the vertical line through the neck and swaps the
/// keypoint 2..4 / 5..7 chains.
Pose mirror_pose(const Pose& pose);

/// Start positions for every cyclic gesture: the first frame of a noiseless,
/// phase-0 cycle generated with `base`'s geometry. StandStill is omitted.
StartPositionTable default_start_positions(Encoding encoding, const SynthConfig& base = {});

}  // namespace gesture

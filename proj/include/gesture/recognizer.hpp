#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gesture/features.hpp"
#include "gesture/model_io.hpp"

namespace gesture {

struct WindowConfig {
  int base_len = 50;        // frames the model was trained on
  double base_fps = 30.0;   // frame rate of the training data
  double fps = 30.0;        // frame rate of the incoming stream
  double speed_ratio = 1.0; // expected gesture speed relative to training
  int vote_n = 5;
  double retention = 0.5;   // fraction of the window kept between evaluations

  /// Throws InvalidConfig unless base_len >= 2, fps values and speed_ratio
  /// are positive, vote_n >= 1 and 0 < retention < 1.
  void validate() const;
};

/// round(base_len * (fps / base_fps) / speed_ratio), at least 2.
int effective_window(const WindowConfig& config);

/// Frames between consecutive evaluations: ceil((1 - retention) * window).
int evaluation_stride(const WindowConfig& config);

/// Most frequent label; among tied labels the one voted most recently wins.
int majority_vote(std::span<const int> history);

struct Emission {
  std::size_t frame = 0;  // frames consumed so far, so the first is the window size
  int raw = 0;
  int smoothed = 0;
  double confidence = 0.0;  // softmax probability of `raw`
  friend bool operator==(const Emission&, const Emission&) = default;
};

/// Streaming sliding-window classifier for one stream. Not thread-safe; the
/// model is shared read-only.
class Recognizer {
 public:
  Recognizer(std::shared_ptr<const Model> model, WindowConfig config);

  /// Appends a frame; returns an emission when the window is evaluated.
  /// Throws EncodingMismatch for a vector of the wrong encoding or width.
  std::optional<Emission> push_frame(const FeatureVector& fv);

  int capacity() const noexcept { return capacity_; }
  int stride() const noexcept { return stride_; }
  std::size_t frames_seen() const noexcept { return frames_seen_; }
  const std::deque<int>& votes() const noexcept { return votes_; }

 private:
  std::shared_ptr<const Model> model_;
  WindowConfig config_;
  int capacity_;
  int stride_;
  Eigen::MatrixXd ring_;  // capacity x dim, row (head_ + k) % capacity is the k-th oldest
  int head_ = 0;
  int filled_ = 0;
  std::size_t frames_seen_ = 0;
  std::size_t next_eval_ = 0;
  std::deque<int> votes_;
};

/// Offline replay: the emissions of feeding `frames` through push_frame in
/// order. Throws TooShort if there are fewer frames than the window.
std::vector<Emission> classify_sequence(std::span<const FeatureVector> frames,
                                        std::shared_ptr<const Model> model, const WindowConfig& config);

/// Rows of an encoded sequence as feature vectors.
std::vector<FeatureVector> to_feature_vectors(const Eigen::MatrixXd& features, Encoding encoding);

}  // namespace gesture

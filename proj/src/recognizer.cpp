#include "gesture/recognizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "gesture/error.hpp"

namespace gesture {

void WindowConfig::validate() const {
  if (base_len < 2) throw Error(ErrorCode::InvalidConfig, "base window must hold at least 2 frames");
  if (!(base_fps > 0.0) || !(fps > 0.0)) throw Error(ErrorCode::InvalidConfig, "fps must be positive");
  if (!(speed_ratio > 0.0)) throw Error(ErrorCode::NonPositiveRatio, "speed ratio must be positive");
  if (vote_n < 1) throw Error(ErrorCode::InvalidConfig, "vote_n must be at least 1");
  if (!(retention > 0.0 && retention < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "retention must be strictly between 0 and 1");
  }
}

int effective_window(const WindowConfig& config) {
  config.validate();
  const double frames = config.base_len * (config.fps / config.base_fps) / config.speed_ratio;
  return std::max(2, static_cast<int>(std::round(frames)));
}

int evaluation_stride(const WindowConfig& config) {
  const double frames = (1.0 - config.retention) * effective_window(config);
  // the epsilon keeps e.g. 0.7 * 50 = 35.000000000000004 at 35
  return std::max(1, static_cast<int>(std::ceil(frames - 1e-9)));
}

int majority_vote(std::span<const int> history) {
  if (history.empty()) throw Error(ErrorCode::InvalidConfig, "empty vote history");
  std::map<int, int> counts;
  std::map<int, std::size_t> last_seen;
  for (std::size_t i = 0; i < history.size(); ++i) {
    ++counts[history[i]];
    last_seen[history[i]] = i;
  }
  int best = history.back();
  for (const auto& [label, count] : counts) {
    const int best_count = counts[best];
    if (count > best_count || (count == best_count && last_seen[label] > last_seen[best])) best = label;
  }
  return best;
}

Recognizer::Recognizer(std::shared_ptr<const Model> model, WindowConfig config)
    : model_(std::move(model)), config_(config), capacity_(effective_window(config)),
      stride_(evaluation_stride(config)) {
  if (!model_) throw Error(ErrorCode::InvalidConfig, "recognizer needs a model");
  ring_.resize(capacity_, feature_dim(model_->encoding));
  next_eval_ = static_cast<std::size_t>(capacity_);
}

std::optional<Emission> Recognizer::push_frame(const FeatureVector& fv) {
  if (fv.encoding != model_->encoding ||
      static_cast<Eigen::Index>(fv.values.size()) != ring_.cols()) {
    throw Error(ErrorCode::EncodingMismatch,
                "frame is " + std::string(to_string(fv.encoding)) + " with " +
                    std::to_string(fv.values.size()) + " values, model expects " +
                    std::string(to_string(model_->encoding)));
  }
  const int slot = filled_ < capacity_ ? filled_ : head_;
  for (Eigen::Index j = 0; j < ring_.cols(); ++j) ring_(slot, j) = fv.values[static_cast<std::size_t>(j)];
  if (filled_ < capacity_) {
    ++filled_;
  } else {
    head_ = (head_ + 1) % capacity_;
  }
  ++frames_seen_;
  if (frames_seen_ != next_eval_) return std::nullopt;
  next_eval_ += static_cast<std::size_t>(stride_);

  Eigen::MatrixXd window(capacity_, ring_.cols());
  for (int k = 0; k < capacity_; ++k) window.row(k) = ring_.row((head_ + k) % capacity_);
  const nn::VectorXd probs = nn::softmax(nn::forward(model_->params, window));
  Eigen::Index raw = 0;
  const double confidence = probs.maxCoeff(&raw);

  votes_.push_back(static_cast<int>(raw));
  while (votes_.size() > static_cast<std::size_t>(config_.vote_n)) votes_.pop_front();
  const std::vector<int> history(votes_.begin(), votes_.end());
  return Emission{frames_seen_, static_cast<int>(raw), majority_vote(history), confidence};
}

std::vector<Emission> classify_sequence(std::span<const FeatureVector> frames,
                                        std::shared_ptr<const Model> model, const WindowConfig& config) {
  Recognizer rec(std::move(model), config);
  if (frames.size() < static_cast<std::size_t>(rec.capacity())) {
    throw Error(ErrorCode::TooShort, std::to_string(frames.size()) + " frames, window needs " +
                                         std::to_string(rec.capacity()));
  }
  std::vector<Emission> out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    try {
      if (auto e = rec.push_frame(frames[i])) out.push_back(*e);
    } catch (const Error& e) {
      throw e.with_frame(i);
    }
  }
  return out;
}

std::vector<FeatureVector> to_feature_vectors(const Eigen::MatrixXd& features, Encoding encoding) {
  std::vector<FeatureVector> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    auto& fv = out[static_cast<std::size_t>(t)];
    fv.encoding = encoding;
    fv.values.resize(static_cast<std::size_t>(features.cols()));
    for (Eigen::Index j = 0; j < features.cols(); ++j) fv.values[static_cast<std::size_t>(j)] = features(t, j);
  }
  return out;
}

}  // namespace gesture

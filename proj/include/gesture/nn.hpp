#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gesture::nn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Layer sizes of input -> Linear -> Linear -> GRU -> Linear -> Linear.
struct ModelConfig {
  int input_dim = 18;
  int hidden1 = 2048;
  int hidden2 = 1024;
  int gru_hidden = 256;
  int head = 128;
  int output_dim = 8;
  std::uint64_t seed = 1;

  /// The recognition network: N -> 2048 -> 1024 -> GRU 256 -> 128 -> M.
  static ModelConfig standard(int input_dim, int output_dim = 8, std::uint64_t seed = 1);
  /// Throws InvalidConfig unless every size is positive.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// All trainable tensors. Biases are single-column matrices. The GRU blocks
/// stack their gates by rows in the order update (z), reset (r), candidate:
///   gru_w: 3H x hidden2, gru_u: 3H x H, gru_b: 3H x 1.
struct Params {
  MatrixXd w1, b1;
  MatrixXd w2, b2;
  MatrixXd gru_w, gru_u, gru_b;
  MatrixXd w3, b3;
  MatrixXd w4, b4;

  static Params zeros(const ModelConfig& config);
  /// Uniform in +-1/sqrt(fan_in), drawn from config.seed.
  static Params init(const ModelConfig& config);

  static constexpr std::size_t kNumTensors = 11;
  static constexpr std::array<std::string_view, kNumTensors> kNames = {
      "w1", "b1", "w2", "b2", "gru_w", "gru_u", "gru_b", "w3", "b3", "w4", "b4"};

  /// Tensors in kNames order.
  std::array<MatrixXd*, kNumTensors> tensors();
  std::array<const MatrixXd*, kNumTensors> tensors() const;

  std::size_t size() const;
  bool all_finite() const;
  ModelConfig shape_config() const;  // seed left at 0
};

/// Logits for one window (rows = time steps, cols = input_dim). Throws
/// ShapeMismatch on a wrong width or an empty window.
VectorXd forward(const Params& params, const MatrixXd& window);

/// Logits (output_dim x batch) for windows that share one length.
MatrixXd forward_batch(const Params& params, std::span<const MatrixXd* const> windows);

struct LossAndGrad {
  double loss = 0.0;
  VectorXd grad;  // d loss / d logits
};

/// -log softmax(logits)[label] with max subtraction, and softmax - onehot.
LossAndGrad cross_entropy(const VectorXd& logits, int label);

VectorXd softmax(const VectorXd& logits);

/// Summed cross-entropy of the batch; `grads` receives its exact gradient
/// (backpropagation through every time step).
double backward(const Params& params, std::span<const MatrixXd* const> windows,
                std::span<const int> labels, Params& grads);

struct SampleGrad {
  double loss = 0.0;
  Params grads;
};
SampleGrad backward(const Params& params, const MatrixXd& window, int label);

struct AdamState {
  Params m;
  Params v;
  long step = 0;

  static AdamState for_params(const Params& params);
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

/// One bias-corrected Adam update. Throws NonFiniteGradient (leaving params
/// and state untouched) if any gradient entry is NaN or infinite.
void adam_step(Params& params, const Params& grads, AdamState& state, double lr);

struct GradientCheck {
  double max_relative_error = 0.0;
  std::string_view worst_tensor;
  Eigen::Index worst_index = 0;
  std::size_t checked = 0;
};

/// Compares backward() against central finite differences of
/// cross_entropy(forward(...)) for every parameter entry. The relative
/// error of one entry is |analytic - numeric| / max(|analytic|, |numeric|, floor).
GradientCheck gradient_check(const Params& params, const MatrixXd& window, int label,
                             double epsilon = 1e-4, double floor = 1e-8);

}  // namespace gesture::nn

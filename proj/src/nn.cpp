#include "gesture/nn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gesture/error.hpp"

namespace gesture::nn {

namespace {

MatrixXd uniform(Eigen::Index rows, Eigen::Index cols, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  MatrixXd m(rows, cols);
  // column-major fill order is part of the determinism contract
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

MatrixXd relu(const MatrixXd& m) { return m.cwiseMax(0.0); }

MatrixXd relu_mask(const MatrixXd& activated) {
  return (activated.array() > 0.0).cast<double>().matrix();
}

MatrixXd sigmoid(const MatrixXd& m) { return (1.0 / (1.0 + (-m.array()).exp())).matrix(); }

// Intermediate values of a batched forward pass. Column t * B + b holds time
// step t of sample b.
struct Cache {
  Eigen::Index steps = 0;
  Eigen::Index batch = 0;
  MatrixXd x, h1, h2;
  MatrixXd z, r, cand, h_prev, rh;
  MatrixXd h_last, h3, logits;
};

void check_batch(const Params& p, std::span<const MatrixXd* const> windows) {
  if (windows.empty()) throw Error(ErrorCode::ShapeMismatch, "empty batch");
  const Eigen::Index steps = windows.front()->rows();
  if (steps < 1) throw Error(ErrorCode::ShapeMismatch, "window has no time steps");
  for (const MatrixXd* w : windows) {
    if (w->cols() != p.w1.cols()) {
      throw Error(ErrorCode::ShapeMismatch, "window width " + std::to_string(w->cols()) +
                                                " does not match input_dim " +
                                                std::to_string(p.w1.cols()));
    }
    if (w->rows() != steps) throw Error(ErrorCode::ShapeMismatch, "windows differ in length");
  }
}

Cache run_forward(const Params& p, std::span<const MatrixXd* const> windows, bool keep_all) {
  check_batch(p, windows);
  Cache c;
  c.batch = static_cast<Eigen::Index>(windows.size());
  c.steps = windows.front()->rows();
  const Eigen::Index B = c.batch;
  const Eigen::Index T = c.steps;
  const Eigen::Index H = p.gru_u.cols();

  c.x.resize(p.w1.cols(), T * B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const MatrixXd& w = *windows[static_cast<std::size_t>(b)];
    for (Eigen::Index t = 0; t < T; ++t) c.x.col(t * B + b) = w.row(t).transpose();
  }
  c.h1.noalias() = p.w1 * c.x;
  c.h1.colwise() += p.b1.col(0);
  c.h1 = relu(c.h1);
  c.h2.noalias() = p.w2 * c.h1;
  c.h2.colwise() += p.b2.col(0);
  c.h2 = relu(c.h2);

  MatrixXd gx = p.gru_w * c.h2;
  gx.colwise() += p.gru_b.col(0);
  if (keep_all) {
    c.z.resize(H, T * B);
    c.r.resize(H, T * B);
    c.cand.resize(H, T * B);
    c.h_prev.resize(H, T * B);
    c.rh.resize(H, T * B);
  }
  MatrixXd h = MatrixXd::Zero(H, B);
  MatrixXd zr(2 * H, B);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::Index col = t * B;
    zr.noalias() = p.gru_u.topRows(2 * H) * h;
    const MatrixXd z = sigmoid(gx.block(0, col, H, B) + zr.topRows(H));
    const MatrixXd r = sigmoid(gx.block(H, col, H, B) + zr.bottomRows(H));
    const MatrixXd rh = r.cwiseProduct(h);
    MatrixXd cand = gx.block(2 * H, col, H, B);
    cand.noalias() += p.gru_u.bottomRows(H) * rh;
    cand = cand.array().tanh().matrix();
    if (keep_all) {
      c.z.middleCols(col, B) = z;
      c.r.middleCols(col, B) = r;
      c.cand.middleCols(col, B) = cand;
      c.h_prev.middleCols(col, B) = h;
      c.rh.middleCols(col, B) = rh;
    }
    h = (1.0 - z.array()).matrix().cwiseProduct(h) + z.cwiseProduct(cand);
  }
  c.h_last = std::move(h);
  c.h3.noalias() = p.w3 * c.h_last;
  c.h3.colwise() += p.b3.col(0);
  c.h3 = relu(c.h3);
  c.logits.noalias() = p.w4 * c.h3;
  c.logits.colwise() += p.b4.col(0);
  return c;
}

}  // namespace

ModelConfig ModelConfig::standard(int input_dim, int output_dim, std::uint64_t seed) {
  ModelConfig c;
  c.input_dim = input_dim;
  c.output_dim = output_dim;
  c.seed = seed;
  return c;
}

void ModelConfig::validate() const {
  if (input_dim < 1 || hidden1 < 1 || hidden2 < 1 || gru_hidden < 1 || head < 1 || output_dim < 1) {
    throw Error(ErrorCode::InvalidConfig, "all layer sizes must be positive");
  }
}

Params Params::zeros(const ModelConfig& c) {
  c.validate();
  Params p;
  p.w1 = MatrixXd::Zero(c.hidden1, c.input_dim);
  p.b1 = MatrixXd::Zero(c.hidden1, 1);
  p.w2 = MatrixXd::Zero(c.hidden2, c.hidden1);
  p.b2 = MatrixXd::Zero(c.hidden2, 1);
  p.gru_w = MatrixXd::Zero(3 * c.gru_hidden, c.hidden2);
  p.gru_u = MatrixXd::Zero(3 * c.gru_hidden, c.gru_hidden);
  p.gru_b = MatrixXd::Zero(3 * c.gru_hidden, 1);
  p.w3 = MatrixXd::Zero(c.head, c.gru_hidden);
  p.b3 = MatrixXd::Zero(c.head, 1);
  p.w4 = MatrixXd::Zero(c.output_dim, c.head);
  p.b4 = MatrixXd::Zero(c.output_dim, 1);
  return p;
}

Params Params::init(const ModelConfig& c) {
  c.validate();
  std::mt19937_64 rng(c.seed);
  const auto bound = [](int fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); };
  Params p;
  p.w1 = uniform(c.hidden1, c.input_dim, bound(c.input_dim), rng);
  p.b1 = uniform(c.hidden1, 1, bound(c.input_dim), rng);
  p.w2 = uniform(c.hidden2, c.hidden1, bound(c.hidden1), rng);
  p.b2 = uniform(c.hidden2, 1, bound(c.hidden1), rng);
  p.gru_w = uniform(3 * c.gru_hidden, c.hidden2, bound(c.hidden2), rng);
  p.gru_u = uniform(3 * c.gru_hidden, c.gru_hidden, bound(c.gru_hidden), rng);
  p.gru_b = uniform(3 * c.gru_hidden, 1, bound(c.gru_hidden), rng);
  p.w3 = uniform(c.head, c.gru_hidden, bound(c.gru_hidden), rng);
  p.b3 = uniform(c.head, 1, bound(c.gru_hidden), rng);
  p.w4 = uniform(c.output_dim, c.head, bound(c.head), rng);
  p.b4 = uniform(c.output_dim, 1, bound(c.head), rng);
  return p;
}

std::array<MatrixXd*, Params::kNumTensors> Params::tensors() {
  return {&w1, &b1, &w2, &b2, &gru_w, &gru_u, &gru_b, &w3, &b3, &w4, &b4};
}

std::array<const MatrixXd*, Params::kNumTensors> Params::tensors() const {
  return {&w1, &b1, &w2, &b2, &gru_w, &gru_u, &gru_b, &w3, &b3, &w4, &b4};
}

std::size_t Params::size() const {
  std::size_t n = 0;
  for (const MatrixXd* t : tensors()) n += static_cast<std::size_t>(t->size());
  return n;
}

bool Params::all_finite() const {
  for (const MatrixXd* t : tensors()) {
    if (!t->allFinite()) return false;
  }
  return true;
}

ModelConfig Params::shape_config() const {
  ModelConfig c;
  c.input_dim = static_cast<int>(w1.cols());
  c.hidden1 = static_cast<int>(w1.rows());
  c.hidden2 = static_cast<int>(w2.rows());
  c.gru_hidden = static_cast<int>(gru_u.cols());
  c.head = static_cast<int>(w3.rows());
  c.output_dim = static_cast<int>(w4.rows());
  c.seed = 0;
  return c;
}

VectorXd forward(const Params& params, const MatrixXd& window) {
  const MatrixXd* one[] = {&window};
  return run_forward(params, one, false).logits.col(0);
}

MatrixXd forward_batch(const Params& params, std::span<const MatrixXd* const> windows) {
  return run_forward(params, windows, false).logits;
}

VectorXd softmax(const VectorXd& logits) {
  const VectorXd e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

LossAndGrad cross_entropy(const VectorXd& logits, int label) {
  if (label < 0 || label >= logits.size()) {
    throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(label) + " outside [0, " +
                                                std::to_string(logits.size()) + ")");
  }
  const double max = logits.maxCoeff();
  const VectorXd shifted = logits.array() - max;
  const double log_sum = std::log(shifted.array().exp().sum());
  LossAndGrad out;
  out.loss = log_sum - shifted(label);
  out.grad = (shifted.array() - log_sum).exp().matrix();
  out.grad(label) -= 1.0;
  return out;
}

double backward(const Params& p, std::span<const MatrixXd* const> windows,
                std::span<const int> labels, Params& g) {
  if (labels.size() != windows.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one label per window required");
  }
  const Cache c = run_forward(p, windows, true);
  const Eigen::Index B = c.batch;
  const Eigen::Index T = c.steps;
  const Eigen::Index H = p.gru_u.cols();

  double loss = 0.0;
  MatrixXd d_logits(c.logits.rows(), B);
  for (Eigen::Index b = 0; b < B; ++b) {
    LossAndGrad lg = cross_entropy(c.logits.col(b), labels[static_cast<std::size_t>(b)]);
    loss += lg.loss;
    d_logits.col(b) = lg.grad;
  }

  g.w4.noalias() = d_logits * c.h3.transpose();
  g.b4 = d_logits.rowwise().sum();
  MatrixXd d_h3 = (p.w4.transpose() * d_logits).cwiseProduct(relu_mask(c.h3));
  g.w3.noalias() = d_h3 * c.h_last.transpose();
  g.b3 = d_h3.rowwise().sum();
  MatrixXd d_h = p.w3.transpose() * d_h3;

  // Pre-activation gradients of the three gates, same column layout as gx.
  MatrixXd d_gates(3 * H, T * B);
  MatrixXd d_zr(2 * H, B);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const Eigen::Index col = t * B;
    const auto z = c.z.middleCols(col, B).array();
    const auto r = c.r.middleCols(col, B).array();
    const auto cand = c.cand.middleCols(col, B).array();
    const auto h_prev = c.h_prev.middleCols(col, B).array();

    const MatrixXd d_cand_pre = (d_h.array() * z * (1.0 - cand.square())).matrix();
    const MatrixXd d_rh = p.gru_u.bottomRows(H).transpose() * d_cand_pre;
    d_zr.topRows(H) = (d_h.array() * (cand - h_prev) * z * (1.0 - z)).matrix();
    d_zr.bottomRows(H) = (d_rh.array() * h_prev * r * (1.0 - r)).matrix();

    MatrixXd d_prev = (d_h.array() * (1.0 - z) + d_rh.array() * r).matrix();
    d_prev.noalias() += p.gru_u.topRows(2 * H).transpose() * d_zr;

    d_gates.block(0, col, 2 * H, B) = d_zr;
    d_gates.block(2 * H, col, H, B) = d_cand_pre;
    d_h = std::move(d_prev);
  }
  g.gru_w.noalias() = d_gates * c.h2.transpose();
  g.gru_b = d_gates.rowwise().sum();
  g.gru_u.resize(3 * H, H);
  g.gru_u.topRows(2 * H).noalias() = d_gates.topRows(2 * H) * c.h_prev.transpose();
  g.gru_u.bottomRows(H).noalias() = d_gates.bottomRows(H) * c.rh.transpose();

  MatrixXd d_h2 = (p.gru_w.transpose() * d_gates).cwiseProduct(relu_mask(c.h2));
  g.w2.noalias() = d_h2 * c.h1.transpose();
  g.b2 = d_h2.rowwise().sum();
  MatrixXd d_h1 = (p.w2.transpose() * d_h2).cwiseProduct(relu_mask(c.h1));
  g.w1.noalias() = d_h1 * c.x.transpose();
  g.b1 = d_h1.rowwise().sum();
  return loss;
}

SampleGrad backward(const Params& params, const MatrixXd& window, int label) {
  SampleGrad out;
  const MatrixXd* one[] = {&window};
  const int labels[] = {label};
  out.loss = backward(params, one, labels, out.grads);
  return out;
}

AdamState AdamState::for_params(const Params& params) {
  AdamState s;
  s.m = params;
  for (MatrixXd* t : s.m.tensors()) t->setZero();
  s.v = s.m;
  return s;
}

void adam_step(Params& params, const Params& grads, AdamState& state, double lr) {
  const auto p = params.tensors();
  const auto g = grads.tensors();
  const auto m = state.m.tensors();
  const auto v = state.v.tensors();
  for (std::size_t i = 0; i < Params::kNumTensors; ++i) {
    if (g[i]->rows() != p[i]->rows() || g[i]->cols() != p[i]->cols() ||
        m[i]->rows() != p[i]->rows() || m[i]->cols() != p[i]->cols()) {
      throw Error(ErrorCode::ShapeMismatch, "gradient shape differs for " + std::string(Params::kNames[i]));
    }
    if (!g[i]->allFinite()) {
      throw Error(ErrorCode::NonFiniteGradient,
                  "non-finite gradient in " + std::string(Params::kNames[i]));
    }
  }
  ++state.step;
  const double correction1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < Params::kNumTensors; ++i) {
    auto mi = m[i]->array();
    auto vi = v[i]->array();
    const auto gi = g[i]->array();
    mi = kAdamBeta1 * mi + (1.0 - kAdamBeta1) * gi;
    vi = kAdamBeta2 * vi + (1.0 - kAdamBeta2) * gi.square();
    p[i]->array() -= lr * (mi / correction1) / ((vi / correction2).sqrt() + kAdamEpsilon);
  }
}

GradientCheck gradient_check(const Params& params, const MatrixXd& window, int label,
                             double epsilon, double floor) {
  const SampleGrad analytic = backward(params, window, label);
  Params probe = params;
  const auto loss_at = [&]() { return cross_entropy(forward(probe, window), label).loss; };
  GradientCheck report;
  auto tensors = probe.tensors();
  const auto grads = analytic.grads.tensors();
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    MatrixXd& tensor = *tensors[t];
    for (Eigen::Index i = 0; i < tensor.size(); ++i) {
      const double original = tensor.data()[i];
      tensor.data()[i] = original + epsilon;
      const double up = loss_at();
      tensor.data()[i] = original - epsilon;
      const double down = loss_at();
      tensor.data()[i] = original;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = grads[t]->data()[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++report.checked;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_tensor = Params::kNames[t];
        report.worst_index = i;
      }
    }
  }
  return report;
}

}  // namespace gesture::nn

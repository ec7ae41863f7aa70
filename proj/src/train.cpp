#include "gesture/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "gesture/error.hpp"

namespace gesture {

namespace {

constexpr std::size_t kEvalBatch = 32;

struct EvalStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Groups sample indices by window length so each forward batch is uniform.
std::map<Eigen::Index, std::vector<std::size_t>> by_length(std::span<const Eigen::MatrixXd* const> windows) {
  std::map<Eigen::Index, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < windows.size(); ++i) groups[windows[i]->rows()].push_back(i);
  return groups;
}

std::vector<nn::VectorXd> logits_for(const nn::Params& params,
                                     std::span<const Eigen::MatrixXd* const> windows) {
  std::vector<nn::VectorXd> out(windows.size());
  for (const auto& [len, idx] : by_length(windows)) {
    for (std::size_t start = 0; start < idx.size(); start += kEvalBatch) {
      const std::size_t end = std::min(idx.size(), start + kEvalBatch);
      std::vector<const Eigen::MatrixXd*> batch;
      for (std::size_t k = start; k < end; ++k) batch.push_back(windows[idx[k]]);
      const nn::MatrixXd logits = nn::forward_batch(params, batch);
      for (std::size_t k = start; k < end; ++k) out[idx[k]] = logits.col(static_cast<Eigen::Index>(k - start));
    }
  }
  return out;
}

std::vector<const Eigen::MatrixXd*> window_ptrs(std::span<const Sample> samples) {
  std::vector<const Eigen::MatrixXd*> ptrs;
  ptrs.reserve(samples.size());
  for (const Sample& s : samples) ptrs.push_back(&s.window);
  return ptrs;
}

int argmax(const nn::VectorXd& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

EvalStats evaluate(const nn::Params& params, std::span<const Sample> samples) {
  EvalStats s;
  if (samples.empty()) return s;
  const auto logits = logits_for(params, window_ptrs(samples));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    s.loss += nn::cross_entropy(logits[i], samples[i].label).loss;
    if (argmax(logits[i]) == samples[i].label) ++correct;
  }
  s.loss /= static_cast<double>(samples.size());
  s.accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
  return s;
}

void check_dataset(std::span<const Sample> samples, int output_dim) {
  if (samples.empty()) throw Error(ErrorCode::EmptyDataset, "no training samples");
  const auto rows = samples.front().window.rows();
  const auto cols = samples.front().window.cols();
  for (const Sample& s : samples) {
    if (s.window.rows() != rows || s.window.cols() != cols) {
      throw Error(ErrorCode::InconsistentShapes, "training windows differ in shape");
    }
    if (s.label < 0 || s.label >= output_dim) {
      throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(s.label));
    }
  }
}

}  // namespace

std::vector<Eigen::MatrixXd> slice_windows(const Eigen::MatrixXd& features, int length, int stride) {
  if (length < 1 || stride < 1) throw Error(ErrorCode::InvalidConfig, "window length and stride must be positive");
  if (features.rows() < length) {
    throw Error(ErrorCode::TooShort, "sequence of " + std::to_string(features.rows()) +
                                         " frames is shorter than the " + std::to_string(length) +
                                         "-frame window");
  }
  std::vector<Eigen::MatrixXd> out;
  for (Eigen::Index start = 0; start + length <= features.rows(); start += stride) {
    out.emplace_back(features.middleRows(start, length));
  }
  return out;
}

std::vector<Sample> make_samples(std::span<const Sequence> sequences, Encoding encoding, int length,
                                 int stride) {
  std::vector<Sample> out;
  for (const Sequence& seq : sequences) {
    if (!seq.label) throw Error(ErrorCode::UnknownLabel, "training sequence without a label");
    for (auto& w : slice_windows(encode_sequence(seq, encoding), length, stride)) {
      out.push_back(Sample{std::move(w), class_index(*seq.label)});
    }
  }
  return out;
}

Split split_dataset(std::span<const int> labels, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> per_class;
  for (std::size_t i = 0; i < labels.size(); ++i) per_class[labels[i]].push_back(i);
  std::mt19937_64 rng(seed);
  Split split;
  for (auto& [label, idx] : per_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const double n = static_cast<double>(idx.size());
    const auto n_train = static_cast<std::size_t>(std::round(0.6 * n));
    const auto n_train_val = static_cast<std::size_t>(std::round(0.7 * n));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto& dst = k < n_train ? split.train : (k < n_train_val ? split.val : split.test);
      dst.push_back(idx[k]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

TrainResult fit(std::span<const Sample> train, std::span<const Sample> val, const TrainOptions& options) {
  options.model.validate();
  check_dataset(train, options.model.output_dim);
  if (train.front().window.cols() != options.model.input_dim) {
    throw Error(ErrorCode::InconsistentShapes, "window width does not match input_dim");
  }
  if (options.epochs < 1 || options.batch_size < 1 || !(options.lr > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "epochs, batch size and learning rate must be positive");
  }
  const std::span<const Sample> selection = val.empty() ? train : val;

  nn::Params params = nn::Params::init(options.model);
  nn::AdamState adam = nn::AdamState::for_params(params);
  nn::Params grads;
  std::mt19937_64 rng(options.model.seed ^ 0x9e3779b97f4a7c15ull);

  TrainResult result;
  result.params = params;
  double best_acc = -1.0;
  double best_loss = 0.0;
  int since_best = 0;
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    const auto batch = static_cast<std::size_t>(options.batch_size);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      std::vector<const Eigen::MatrixXd*> windows;
      std::vector<int> labels;
      for (std::size_t k = start; k < end; ++k) {
        windows.push_back(&train[order[k]].window);
        labels.push_back(train[order[k]].label);
      }
      epoch_loss += nn::backward(params, windows, labels, grads);
      nn::adam_step(params, grads, adam, options.lr);
    }
    const EvalStats v = evaluate(params, selection);
    const EpochStats stats{epoch, epoch_loss / static_cast<double>(train.size()), v.loss, v.accuracy};
    result.history.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);

    if (v.accuracy > best_acc || (v.accuracy == best_acc && v.loss < best_loss)) {
      best_acc = v.accuracy;
      best_loss = v.loss;
      result.params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (options.patience > 0 && ++since_best >= options.patience) {
      break;
    }
  }
  return result;
}

TrainOutcome train(std::span<const Sample> dataset, const TrainOptions& options, std::uint64_t split_seed) {
  check_dataset(dataset, options.model.output_dim);
  std::vector<int> labels;
  for (const Sample& s : dataset) labels.push_back(s.label);
  TrainOutcome out;
  out.split = split_dataset(labels, split_seed);
  const auto train_set = gather(dataset, std::span<const std::size_t>(out.split.train));
  const auto val_set = gather(dataset, std::span<const std::size_t>(out.split.val));
  const auto test_set = gather(dataset, std::span<const std::size_t>(out.split.test));
  out.result = fit(train_set, val_set, options);
  out.test_accuracy = test_set.empty() ? 0.0 : accuracy(out.result.params, test_set);
  return out;
}

std::vector<int> predict(const nn::Params& params, std::span<const Eigen::MatrixXd* const> windows) {
  std::vector<int> out;
  for (const auto& l : logits_for(params, windows)) out.push_back(argmax(l));
  return out;
}

std::vector<int> predict(const nn::Params& params, std::span<const Sample> samples) {
  return predict(params, window_ptrs(samples));
}

double accuracy(const nn::Params& params, std::span<const Sample> samples) {
  return evaluate(params, samples).accuracy;
}

}  // namespace gesture

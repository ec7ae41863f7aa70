#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gesture/features.hpp"
#include "gesture/nn.hpp"
#include "gesture/skeleton.hpp"

namespace gesture {

struct Sample {
  Eigen::MatrixXd window;  // time x feature
  int label = 0;
};

/// Windows of `length` rows starting every `stride` rows (last partial
/// window dropped). Throws TooShort when no full window fits.
std::vector<Eigen::MatrixXd> slice_windows(const Eigen::MatrixXd& features, int length, int stride);

/// Encodes labelled sequences and slices them into training samples.
std::vector<Sample> make_samples(std::span<const Sequence> sequences, Encoding encoding, int length,
                                 int stride);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Stratified 60/10/30 split: within each class the indices are shuffled
/// with `seed` and cut at round(0.6 n) and round(0.7 n). Each list is sorted.
Split split_dataset(std::span<const int> labels, std::uint64_t seed);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // mean per sample
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainOptions {
  nn::ModelConfig model;
  int epochs = 30;
  double lr = 1e-3;
  int batch_size = 16;
  int patience = 0;  // stop after this many epochs without improvement; 0 = never
  std::function<void(const EpochStats&)> on_epoch;
};

struct TrainResult {
  nn::Params params;  // best validation epoch
  std::vector<EpochStats> history;
  int best_epoch = 0;
};

/// Minibatch Adam on summed cross-entropy. The best epoch has the highest
/// validation accuracy, ties broken by lower validation loss. With an empty
/// validation set the training set is used for selection.
TrainResult fit(std::span<const Sample> train, std::span<const Sample> val, const TrainOptions& options);

struct TrainOutcome {
  TrainResult result;
  Split split;
  double test_accuracy = 0.0;
};

/// Splits `dataset` with `split_seed`, fits on the training part, selects on
/// validation and reports accuracy on the test part.
TrainOutcome train(std::span<const Sample> dataset, const TrainOptions& options, std::uint64_t split_seed);

/// Argmax class per sample; samples are batched by window length.
std::vector<int> predict(const nn::Params& params, std::span<const Sample> samples);
std::vector<int> predict(const nn::Params& params, std::span<const Eigen::MatrixXd* const> windows);
double accuracy(const nn::Params& params, std::span<const Sample> samples);

template <class T>
std::vector<T> gather(std::span<const T> items, std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(items[i]);
  return out;
}

}  // namespace gesture

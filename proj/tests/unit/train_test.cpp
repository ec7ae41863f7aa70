#include <algorithm>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "gesture/error.hpp"
#include "gesture/synth.hpp"
#include "gesture/train.hpp"

using namespace gesture;

namespace {

nn::ModelConfig small(int input_dim, std::uint64_t seed = 1) {
  nn::ModelConfig c;
  c.input_dim = input_dim;
  c.hidden1 = 32;
  c.hidden2 = 24;
  c.gru_hidden = 16;
  c.head = 12;
  c.output_dim = 8;
  c.seed = seed;
  return c;
}

std::vector<Sequence> dataset(int per_class, std::uint64_t seed) {
  SynthConfig base;
  base.n_frames = 30;
  base.seed = seed;
  SynthJitter j;
  j.period_min = 20;
  j.period_max = 30;
  j.noise_frac_max = 0.01;
  j.phase_max = 0.99;
  return generate_dataset(per_class, base, j);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::IoError;
}

}  // namespace

TEST(SliceWindows, CountsAndContents) {
  Eigen::MatrixXd f(10, 2);
  for (int i = 0; i < 10; ++i) f.row(i) << i, -i;
  const auto w = slice_windows(f, 4, 3);
  ASSERT_EQ(w.size(), 3u);  // starts 0, 3, 6
  EXPECT_EQ(w[2](0, 0), 6.0);
  EXPECT_EQ(w[2].rows(), 4);
  EXPECT_EQ(slice_windows(f, 10, 5).size(), 1u);
  EXPECT_EQ(code_of([&] { slice_windows(f, 11, 1); }), ErrorCode::TooShort);
  EXPECT_EQ(code_of([&] { slice_windows(f, 4, 0); }), ErrorCode::InvalidConfig);
}

TEST(SplitDataset, StratifiedSixtyTenThirty) {
  std::vector<int> labels;
  for (int c = 0; c < 8; ++c)
    for (int k = 0; k < 40; ++k) labels.push_back(c);
  const Split s = split_dataset(labels, 123);
  EXPECT_EQ(s.train.size(), 192u);
  EXPECT_EQ(s.val.size(), 32u);
  EXPECT_EQ(s.test.size(), 96u);
  std::vector<std::size_t> all;
  for (const auto* part : {&s.train, &s.val, &s.test}) {
    EXPECT_TRUE(std::is_sorted(part->begin(), part->end()));
    all.insert(all.end(), part->begin(), part->end());
    std::vector<int> per(8, 0);
    for (std::size_t i : *part) ++per[static_cast<std::size_t>(labels[i])];
    EXPECT_EQ(*std::min_element(per.begin(), per.end()), *std::max_element(per.begin(), per.end()));
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> want(labels.size());
  std::iota(want.begin(), want.end(), 0);
  EXPECT_EQ(all, want);
}

TEST(SplitDataset, DeterministicPerSeed) {
  std::vector<int> labels(100);
  for (int i = 0; i < 100; ++i) labels[static_cast<std::size_t>(i)] = i % 3;
  const Split a = split_dataset(labels, 5);
  const Split b = split_dataset(labels, 5);
  const Split c = split_dataset(labels, 6);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, c.train);
}

TEST(Fit, SingleClassIsLearnedQuickly) {
  std::vector<Sample> samples;
  for (int i = 0; i < 20; ++i) samples.push_back({Eigen::MatrixXd::Random(5, 4), 3});
  TrainOptions o;
  o.model = small(4);
  o.epochs = 10;
  o.lr = 1e-2;
  const TrainOutcome out = train(samples, o, 1);
  ASSERT_EQ(out.result.history.size(), 10u);
  EXPECT_EQ(out.result.history.back().val_accuracy, 1.0);
  EXPECT_EQ(out.test_accuracy, 1.0);
}

TEST(Fit, Errors) {
  TrainOptions o;
  o.model = small(4);
  EXPECT_EQ(code_of([&] { train(std::vector<Sample>{}, o, 1); }), ErrorCode::EmptyDataset);
  std::vector<Sample> mixed = {{Eigen::MatrixXd::Zero(5, 4), 0}, {Eigen::MatrixXd::Zero(6, 4), 1}};
  EXPECT_EQ(code_of([&] { train(mixed, o, 1); }), ErrorCode::InconsistentShapes);
  std::vector<Sample> wide = {{Eigen::MatrixXd::Zero(5, 7), 0}};
  EXPECT_EQ(code_of([&] { fit(wide, {}, o); }), ErrorCode::InconsistentShapes);
  std::vector<Sample> bad_label = {{Eigen::MatrixXd::Zero(5, 4), 8}};
  EXPECT_EQ(code_of([&] { fit(bad_label, {}, o); }), ErrorCode::LabelOutOfRange);
}

TEST(Fit, SameSeedSameHistoryBitwise) {
  const auto seqs = dataset(3, 4);
  const auto samples = make_samples(seqs, Encoding::Angle, 30, 30);
  TrainOptions o;
  o.model = small(5, 17);
  o.epochs = 3;
  const TrainOutcome a = train(samples, o, 9);
  const TrainOutcome b = train(samples, o, 9);
  ASSERT_EQ(a.result.history.size(), b.result.history.size());
  for (std::size_t i = 0; i < a.result.history.size(); ++i) {
    EXPECT_EQ(a.result.history[i].train_loss, b.result.history[i].train_loss);
    EXPECT_EQ(a.result.history[i].val_loss, b.result.history[i].val_loss);
    EXPECT_EQ(a.result.history[i].val_accuracy, b.result.history[i].val_accuracy);
  }
  const auto ta = a.result.params.tensors();
  const auto tb = b.result.params.tensors();
  for (std::size_t i = 0; i < ta.size(); ++i) EXPECT_EQ(*ta[i], *tb[i]);
}

TEST(Fit, BestEpochIsSelectedAndPatienceStops) {
  const auto seqs = dataset(4, 5);
  const auto samples = make_samples(seqs, Encoding::Coordinate, 30, 30);
  TrainOptions o;
  o.model = small(18, 3);
  o.epochs = 40;
  o.lr = 3e-3;
  o.patience = 3;
  const TrainOutcome out = train(samples, o, 2);
  const auto& h = out.result.history;
  ASSERT_FALSE(h.empty());
  const EpochStats& best = h[static_cast<std::size_t>(out.result.best_epoch - 1)];
  for (const EpochStats& e : h) {
    EXPECT_TRUE(e.val_accuracy < best.val_accuracy ||
                (e.val_accuracy == best.val_accuracy && e.val_loss >= best.val_loss));
  }
  if (h.size() < 40u) EXPECT_EQ(static_cast<int>(h.size()), out.result.best_epoch + 3);

  // reported params are the best epoch's
  const auto val = gather(std::span<const Sample>(samples), std::span<const std::size_t>(out.split.val));
  EXPECT_EQ(accuracy(out.result.params, val), best.val_accuracy);
}

TEST(Fit, SmallNetworkLearnsSyntheticGestures) {
  const auto seqs = dataset(16, 6);
  const auto samples = make_samples(seqs, Encoding::Coordinate, 30, 30);
  TrainOptions o;
  o.model = small(18, 4);
  o.epochs = 60;
  o.lr = 3e-3;
  o.batch_size = 8;
  const TrainOutcome out = train(samples, o, 3);
  EXPECT_GE(out.result.history.back().train_loss, 0.0);
  EXPECT_LT(out.result.history.back().train_loss, out.result.history.front().train_loss);
  const auto test = gather(std::span<const Sample>(samples), std::span<const std::size_t>(out.split.test));
  EXPECT_GE(accuracy(out.result.params, test), 0.75);
}

TEST(Predict, MixedLengthsMatchForward) {
  const nn::Params p = nn::Params::init(small(5, 8));
  std::vector<Sample> samples;
  for (int i = 0; i < 40; ++i) samples.push_back({Eigen::MatrixXd::Random(3 + i % 3, 5), 0});
  const auto got = predict(p, samples);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Eigen::Index arg = 0;
    nn::forward(p, samples[i].window).maxCoeff(&arg);
    EXPECT_EQ(got[i], arg);
  }
}

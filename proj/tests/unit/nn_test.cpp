#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gesture/error.hpp"
#include "gesture/nn.hpp"

using namespace gesture;
using namespace gesture::nn;

namespace {

ModelConfig tiny(int n = 5, int h1 = 8, int h2 = 8, int gru = 4, int head = 4, int m = 3,
                 std::uint64_t seed = 1) {
  ModelConfig c;
  c.input_dim = n;
  c.hidden1 = h1;
  c.hidden2 = h2;
  c.gru_hidden = gru;
  c.head = head;
  c.output_dim = m;
  c.seed = seed;
  return c;
}

MatrixXd random_window(int t, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd w(t, n);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = u(rng);
  return w;
}

// Plain-loop forward pass written from the layer equations.
std::vector<double> oracle_forward(const Params& p, const MatrixXd& x) {
  using Vec = std::vector<double>;
  const auto affine = [](const MatrixXd& w, const MatrixXd& b, const Vec& in, int row0, int rows) {
    Vec out(static_cast<std::size_t>(rows));
    for (int i = 0; i < rows; ++i) {
      double s = b(row0 + i, 0);
      for (std::size_t j = 0; j < in.size(); ++j) s += w(row0 + i, static_cast<Eigen::Index>(j)) * in[j];
      out[static_cast<std::size_t>(i)] = s;
    }
    return out;
  };
  const auto matvec = [](const MatrixXd& w, const Vec& in, int row0, int rows) {
    Vec out(static_cast<std::size_t>(rows), 0.0);
    for (int i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < in.size(); ++j)
        out[static_cast<std::size_t>(i)] += w(row0 + i, static_cast<Eigen::Index>(j)) * in[j];
    return out;
  };
  const auto relu = [](Vec v) {
    for (double& e : v) e = e > 0 ? e : 0;
    return v;
  };
  const auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const int H = static_cast<int>(p.gru_u.cols());
  Vec h(static_cast<std::size_t>(H), 0.0);
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    Vec xt(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) xt[static_cast<std::size_t>(j)] = x(t, j);
    const Vec a1 = relu(affine(p.w1, p.b1, xt, 0, static_cast<int>(p.w1.rows())));
    const Vec a2 = relu(affine(p.w2, p.b2, a1, 0, static_cast<int>(p.w2.rows())));
    const Vec wz = affine(p.gru_w, p.gru_b, a2, 0, H);
    const Vec wr = affine(p.gru_w, p.gru_b, a2, H, H);
    const Vec wc = affine(p.gru_w, p.gru_b, a2, 2 * H, H);
    const Vec uz = matvec(p.gru_u, h, 0, H);
    const Vec ur = matvec(p.gru_u, h, H, H);
    Vec z(h.size()), r(h.size()), rh(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      z[i] = sig(wz[i] + uz[i]);
      r[i] = sig(wr[i] + ur[i]);
      rh[i] = r[i] * h[i];
    }
    const Vec uc = matvec(p.gru_u, rh, 2 * H, H);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double cand = std::tanh(wc[i] + uc[i]);
      h[i] = (1.0 - z[i]) * h[i] + z[i] * cand;
    }
  }
  const Vec a3 = relu(affine(p.w3, p.b3, h, 0, static_cast<int>(p.w3.rows())));
  return affine(p.w4, p.b4, a3, 0, static_cast<int>(p.w4.rows()));
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

double max_abs_diff(const Params& a, const Params& b) {
  double d = 0.0;
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  for (std::size_t i = 0; i < ta.size(); ++i) d = std::max(d, (*ta[i] - *tb[i]).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

TEST(ModelConfig, StandardShapes) {
  const ModelConfig c = ModelConfig::standard(18);
  EXPECT_EQ(c.hidden1, 2048);
  EXPECT_EQ(c.hidden2, 1024);
  EXPECT_EQ(c.gru_hidden, 256);
  EXPECT_EQ(c.head, 128);
  EXPECT_EQ(c.output_dim, 8);
  const Params p = Params::zeros(ModelConfig::standard(5));
  EXPECT_EQ(p.w1.rows(), 2048);
  EXPECT_EQ(p.w1.cols(), 5);
  EXPECT_EQ(p.w2.rows(), 1024);
  EXPECT_EQ(p.gru_w.rows(), 3 * 256);
  EXPECT_EQ(p.gru_w.cols(), 1024);
  EXPECT_EQ(p.gru_u.rows(), 3 * 256);
  EXPECT_EQ(p.gru_u.cols(), 256);
  EXPECT_EQ(p.w3.rows(), 128);
  EXPECT_EQ(p.w4.rows(), 8);
  EXPECT_EQ(p.shape_config().input_dim, 5);
  ModelConfig bad = tiny();
  bad.hidden1 = 0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidConfig);
}

TEST(Init, WithinFanInBoundAndSeeded) {
  const ModelConfig c = tiny(6, 8, 7, 5, 4, 3, 42);
  const Params a = Params::init(c);
  const Params b = Params::init(c);
  EXPECT_EQ(max_abs_diff(a, b), 0.0);
  ModelConfig other = c;
  other.seed = 43;
  EXPECT_GT(max_abs_diff(a, Params::init(other)), 0.0);
  EXPECT_LE(a.w1.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(6.0));
  EXPECT_LE(a.w2.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(8.0));
  EXPECT_LE(a.gru_u.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(5.0));
  EXPECT_LE(a.w4.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(4.0));
  EXPECT_TRUE(a.all_finite());
}

TEST(Forward, ZeroNetworkGivesZeroLogits) {
  const Params p = Params::zeros(tiny());
  const VectorXd logits = forward(p, MatrixXd::Zero(4, 5));
  ASSERT_EQ(logits.size(), 3);
  EXPECT_EQ(logits.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Forward, BitwiseReproducible) {
  const MatrixXd w = random_window(6, 5, 3);
  const VectorXd a = forward(Params::init(tiny()), w);
  const VectorXd b = forward(Params::init(tiny()), w);
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_EQ(a(i), b(i));
}

TEST(Forward, MatchesLoopOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Params p = Params::init(tiny(5, 8, 8, 4, 4, 3, seed));
    const MatrixXd w = random_window(static_cast<int>(2 + seed), 5, seed + 100);
    const VectorXd got = forward(p, w);
    const std::vector<double> want = oracle_forward(p, w);
    ASSERT_EQ(got.size(), 3);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(got(i), want[static_cast<std::size_t>(i)], 1e-10);
  }
}

TEST(Forward, BatchMatchesSingle) {
  const Params p = Params::init(tiny(5, 8, 8, 4, 4, 3, 9));
  std::vector<MatrixXd> ws;
  for (int i = 0; i < 4; ++i) ws.push_back(random_window(5, 5, 200 + static_cast<std::uint64_t>(i)));
  std::vector<const MatrixXd*> ptrs;
  for (const auto& w : ws) ptrs.push_back(&w);
  const MatrixXd batch = forward_batch(p, ptrs);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT((batch.col(i) - forward(p, ws[static_cast<std::size_t>(i)])).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Forward, ShapeErrors) {
  const Params p = Params::init(tiny());
  EXPECT_EQ(code_of([&] { forward(p, MatrixXd::Zero(4, 6)); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([&] { forward(p, MatrixXd::Zero(0, 5)); }), ErrorCode::ShapeMismatch);
}

TEST(CrossEntropy, UniformLogits) {
  const LossAndGrad lg = cross_entropy(VectorXd::Constant(8, 0.37), 5);
  EXPECT_NEAR(lg.loss, std::log(8.0), 1e-12);
  EXPECT_NEAR(lg.loss, 2.0794415, 1e-7);
  EXPECT_NEAR(lg.grad(5), 1.0 / 8.0 - 1.0, 1e-12);
  EXPECT_NEAR(lg.grad(0), 1.0 / 8.0, 1e-12);
}

TEST(CrossEntropy, SaturatedCorrectPrediction) {
  VectorXd logits = VectorXd::Zero(8);
  logits(2) = 1e6;
  const LossAndGrad lg = cross_entropy(logits, 2);
  EXPECT_GE(lg.loss, 0.0);
  EXPECT_LT(lg.loss, 1e-12);
  EXPECT_TRUE(std::isfinite(cross_entropy(logits, 3).loss));
}

TEST(CrossEntropy, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd logits(8);
    for (Eigen::Index i = 0; i < 8; ++i) logits(i) = n(rng);
    const int label = trial % 8;
    const LossAndGrad lg = cross_entropy(logits, label);
    for (Eigen::Index i = 0; i < 8; ++i) {
      VectorXd up = logits, down = logits;
      up(i) += 1e-5;
      down(i) -= 1e-5;
      const double num = (cross_entropy(up, label).loss - cross_entropy(down, label).loss) / 2e-5;
      EXPECT_LE(std::abs(num - lg.grad(i)), 1e-6 * std::max(1.0, std::abs(num)));
    }
  }
}

TEST(CrossEntropy, LabelOutOfRange) {
  EXPECT_EQ(code_of([] { cross_entropy(VectorXd::Zero(3), 3); }), ErrorCode::LabelOutOfRange);
  EXPECT_EQ(code_of([] { cross_entropy(VectorXd::Zero(3), -1); }), ErrorCode::LabelOutOfRange);
}

TEST(Backward, GradientCheckOnRandomTinyConfigs) {
  std::mt19937_64 rng(2025);
  std::uniform_int_distribution<int> dim(1, 6), hid(1, 8), steps(1, 6), classes(2, 5);
  for (int trial = 0; trial < 12; ++trial) {
    const ModelConfig c = tiny(dim(rng), hid(rng), hid(rng), hid(rng), hid(rng), classes(rng), rng());
    const Params p = Params::init(c);
    const MatrixXd w = random_window(steps(rng), c.input_dim, rng());
    const int label = static_cast<int>(rng() % static_cast<std::uint64_t>(c.output_dim));
    const GradientCheck g = gradient_check(p, w, label);
    EXPECT_EQ(g.checked, p.size());
    EXPECT_LT(g.max_relative_error, 1e-4) << "trial " << trial << " worst " << g.worst_tensor << "["
                                          << g.worst_index << "]";
  }
}

TEST(Backward, GradientShapesMatchParams) {
  const Params p = Params::init(tiny(6, 7, 5, 3, 4, 2));
  const SampleGrad g = backward(p, random_window(4, 6, 1), 1);
  const auto pt = p.tensors();
  const auto gt = g.grads.tensors();
  for (std::size_t i = 0; i < pt.size(); ++i) {
    EXPECT_EQ(pt[i]->rows(), gt[i]->rows()) << Params::kNames[i];
    EXPECT_EQ(pt[i]->cols(), gt[i]->cols()) << Params::kNames[i];
    EXPECT_GT(gt[i]->size(), 0);
  }
  EXPECT_NEAR(g.loss, cross_entropy(forward(p, random_window(4, 6, 1)), 1).loss, 1e-12);
}

TEST(Backward, DuplicateWindowDoublesGradient) {
  const Params p = Params::init(tiny(5, 8, 8, 4, 4, 3, 12));
  const MatrixXd w = random_window(5, 5, 13);
  const SampleGrad single = backward(p, w, 2);
  const MatrixXd* batch[] = {&w, &w};
  const int labels[] = {2, 2};
  Params grads = Params::zeros(tiny(5, 8, 8, 4, 4, 3));
  const double loss = backward(p, batch, labels, grads);
  EXPECT_NEAR(loss, 2.0 * single.loss, 1e-12);
  const auto a = single.grads.tensors();
  const auto b = grads.tensors();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const MatrixXd twice = 2.0 * *a[i];
    const double scale = std::max(1e-300, twice.cwiseAbs().maxCoeff());
    EXPECT_LE((*b[i] - twice).cwiseAbs().maxCoeff() / scale, 1e-12) << Params::kNames[i];
  }
}

TEST(Backward, BatchIsSumOfSamples) {
  const Params p = Params::init(tiny(4, 6, 6, 3, 3, 3, 21));
  std::vector<MatrixXd> ws;
  for (int i = 0; i < 3; ++i) ws.push_back(random_window(4, 4, 50 + static_cast<std::uint64_t>(i)));
  const MatrixXd* batch[] = {&ws[0], &ws[1], &ws[2]};
  const int labels[] = {0, 2, 1};
  Params grads;
  backward(p, batch, labels, grads);
  Params sum = Params::zeros(tiny(4, 6, 6, 3, 3, 3));
  for (int i = 0; i < 3; ++i) {
    const SampleGrad g = backward(p, ws[static_cast<std::size_t>(i)], labels[i]);
    auto st = sum.tensors();
    const auto gt = g.grads.tensors();
    for (std::size_t k = 0; k < st.size(); ++k) *st[k] += *gt[k];
  }
  EXPECT_LT(max_abs_diff(grads, sum), 1e-12);
}

TEST(Adam, ZeroGradientLeavesParams) {
  const Params p0 = Params::init(tiny());
  Params p = p0;
  AdamState s = AdamState::for_params(p);
  for (int i = 0; i < 5; ++i) adam_step(p, Params::zeros(tiny()), s, 1e-3);
  EXPECT_EQ(max_abs_diff(p, p0), 0.0);
  EXPECT_EQ(s.step, 5);
}

TEST(Adam, ZeroGradientOnlyDecaysMoments) {
  Params p = Params::init(tiny());
  AdamState s = AdamState::for_params(p);
  s.m.w1.setConstant(0.5);
  s.v.w1.setConstant(0.25);
  adam_step(p, Params::zeros(tiny()), s, 1e-3);
  EXPECT_NEAR(s.m.w1(0, 0), 0.45, 1e-15);
  EXPECT_NEAR(s.v.w1(0, 0), 0.24975, 1e-15);
  EXPECT_EQ(s.m.b1.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Adam, MatchesClosedFormSteps) {
  Params p = Params::zeros(tiny(1, 1, 1, 1, 1, 1));
  Params g = Params::zeros(tiny(1, 1, 1, 1, 1, 1));
  AdamState s = AdamState::for_params(p);
  const double gs[] = {0.3, -1.2, 0.05, 2.0};
  double m = 0, v = 0, x = 0;
  for (int t = 1; t <= 4; ++t) {
    const double gi = gs[t - 1];
    g.w1(0, 0) = gi;
    adam_step(p, g, s, 0.01);
    m = 0.9 * m + 0.1 * gi;
    v = 0.999 * v + 0.001 * gi * gi;
    const double mh = m / (1 - std::pow(0.9, t));
    const double vh = v / (1 - std::pow(0.999, t));
    x -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    EXPECT_NEAR(p.w1(0, 0), x, 1e-14);
  }
}

TEST(Adam, ConstantGradientStepApproachesLr) {
  Params p = Params::zeros(tiny(1, 1, 1, 1, 1, 1));
  Params g = Params::zeros(tiny(1, 1, 1, 1, 1, 1));
  auto gt = g.tensors();
  for (MatrixXd* t : gt) t->setConstant(0.37);
  g.w4.setConstant(-5.0);
  AdamState s = AdamState::for_params(p);
  const double lr = 1e-3;
  double last_b1 = 0.0, last_w4 = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double b1 = p.b1(0, 0), w4 = p.w4(0, 0);
    adam_step(p, g, s, lr);
    last_b1 = p.b1(0, 0) - b1;
    last_w4 = p.w4(0, 0) - w4;
    if (i == 0) EXPECT_NEAR(std::abs(last_b1), lr, 1e-9);
  }
  EXPECT_NEAR(last_b1, -lr, 1e-9);
  EXPECT_NEAR(last_w4, lr, 1e-9);
}

TEST(Adam, NonFiniteGradientLeavesStateUntouched) {
  const Params p0 = Params::init(tiny());
  for (double bad : {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()}) {
    Params p = p0;
    AdamState s = AdamState::for_params(p);
    Params g = Params::zeros(tiny());
    g.w1.setConstant(0.1);
    g.gru_u(1, 2) = bad;
    EXPECT_EQ(code_of([&] { adam_step(p, g, s, 1e-3); }), ErrorCode::NonFiniteGradient);
    EXPECT_EQ(max_abs_diff(p, p0), 0.0);
    EXPECT_EQ(s.step, 0);
    EXPECT_EQ(s.m.w1.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Adam, OverfitsSingleSample) {
  const ModelConfig c = tiny(5, 16, 16, 8, 8, 4, 3);
  Params p = Params::init(c);
  AdamState s = AdamState::for_params(p);
  const MatrixXd w = random_window(6, 5, 31);
  double loss = 1e9;
  int steps = 0;
  while (steps < 500 && loss >= 1e-3) {
    const SampleGrad g = backward(p, w, 2);
    adam_step(p, g.grads, s, 1e-2);
    ++steps;
    loss = cross_entropy(forward(p, w), 2).loss;
  }
  EXPECT_LT(loss, 1e-3) << "after " << steps << " steps";
}

TEST(Adam, TenThousandStepsStayFinite) {
  const ModelConfig c = tiny(5, 8, 8, 4, 4, 3, 5);
  Params p = Params::init(c);
  AdamState s = AdamState::for_params(p);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10000; ++i) {
    const MatrixXd w = random_window(4, 5, rng());
    const SampleGrad g = backward(p, w, static_cast<int>(rng() % 3));
    adam_step(p, g.grads, s, 1e-3);
  }
  EXPECT_TRUE(p.all_finite());
  EXPECT_TRUE(s.m.all_finite());
  EXPECT_TRUE(s.v.all_finite());
  EXPECT_EQ(s.step, 10000);
}

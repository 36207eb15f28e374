#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "msaeval/lora.hpp"
#include "msaeval/train_config.hpp"
#include "oracles.hpp"

using namespace msaeval;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(r, c);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST(DeltaW, ZeroBGivesZeroUpdate) {
  auto ad = init_adapter(6, 6, 2, 2.0, 42);
  Matrix d = delta_w(ad);
  for (double v : d.data()) EXPECT_EQ(v, 0.0);
  // A is non-trivial under the Gaussian init.
  double s = 0.0;
  for (double v : ad.a.data()) s += std::abs(v);
  EXPECT_GT(s, 0.0);
}

TEST(DeltaW, SingleEntryProduct) {
  LoraAdapter ad{Matrix{{1.0}, {0.0}}, Matrix{{0.0, 1.0}}, 2.0};
  EXPECT_EQ(delta_w(ad), (Matrix{{0.0, 2.0}, {0.0, 0.0}}));
}

TEST(DeltaW, RankBoundedByAdapterRank) {
  std::mt19937_64 rng(3);
  LoraAdapter ad{random_matrix(rng, 8, 3), random_matrix(rng, 3, 8), 2.0};
  EXPECT_EQ(oracle::numerical_rank(delta_w(ad)), 3u);
  // A full-rank 8x8 matrix, to confirm the oracle is not stuck at low values.
  EXPECT_EQ(oracle::numerical_rank(random_matrix(rng, 8, 8)), 8u);
}

TEST(DeltaW, LinearInAlpha) {
  std::mt19937_64 rng(5);
  LoraAdapter one{random_matrix(rng, 5, 2), random_matrix(rng, 2, 5), 1.0};
  LoraAdapter two = one;
  two.alpha = 2.0;
  Matrix d1 = delta_w(one), d2 = delta_w(two);
  for (std::size_t i = 0; i < d1.data().size(); ++i) EXPECT_EQ(d2.data()[i], 2.0 * d1.data()[i]);
}

TEST(DeltaW, ShapeErrors) {
  LoraAdapter bad{Matrix(4, 2), Matrix(3, 4), 1.0};
  EXPECT_THROW(delta_w(bad), DimensionError);
  LoraAdapter too_wide{Matrix(2, 3), Matrix(3, 2), 1.0};
  EXPECT_THROW(delta_w(too_wide), DimensionError);
  EXPECT_THROW(effective_weight(Matrix(3, 3), init_adapter(4, 4, 1, 2.0, 1)), DimensionError);
}

TEST(EffectiveWeight, ZeroAdapterAndZeroBase) {
  std::mt19937_64 rng(9);
  Matrix base = random_matrix(rng, 6, 6);
  EXPECT_EQ(effective_weight(base, init_adapter(6, 6, 3, 2.0, 1)), base);

  LoraAdapter ad{random_matrix(rng, 6, 3), random_matrix(rng, 3, 6), 2.0};
  EXPECT_EQ(effective_weight(Matrix(6, 6), ad), delta_w(ad));
}

TEST(EffectiveWeight, MatchesDenseOracle) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    Matrix base = random_matrix(rng, 7, 7);
    LoraAdapter ad{random_matrix(rng, 7, 3), random_matrix(rng, 3, 7), 2.0};
    Matrix got = effective_weight(base, ad);
    Matrix want = oracle::dense_effective_weight(base, ad);
    for (std::size_t i = 0; i < got.data().size(); ++i) ASSERT_NEAR(got.data()[i], want.data()[i], 1e-12);
  }
}

TEST(Gradients, ZeroLossGradient) {
  std::mt19937_64 rng(17);
  Matrix base = random_matrix(rng, 4, 4);
  LoraAdapter ad{random_matrix(rng, 4, 2), random_matrix(rng, 2, 4), 2.0};
  auto g = adapter_gradients(base, ad, random_vector(rng, 4), std::vector<double>(4, 0.0));
  for (double v : g.a.data()) EXPECT_EQ(v, 0.0);
  for (double v : g.b.data()) EXPECT_EQ(v, 0.0);
}

TEST(Gradients, WorkedTwoByOneCase) {
  // W = I, A = [[1],[2]], B = [[3, -1]], alpha = 2, x = [1, 2], g = [1, -1]
  // Bx = 1, A^T g = -1, so dA = 2 * g * 1 = [[2],[-2]], dB = 2 * -1 * x = [[-2, -4]].
  Matrix base{{1.0, 0.0}, {0.0, 1.0}};
  LoraAdapter ad{Matrix{{1.0}, {2.0}}, Matrix{{3.0, -1.0}}, 2.0};
  std::vector<double> x{1.0, 2.0}, g{1.0, -1.0};
  auto grads = adapter_gradients(base, ad, x, g);
  EXPECT_EQ(grads.a, (Matrix{{2.0}, {-2.0}}));
  EXPECT_EQ(grads.b, (Matrix{{-2.0, -4.0}}));
  auto [fa, fb] = oracle::finite_difference_gradients(base, ad, x, g);
  EXPECT_LT(oracle::max_relative_error(grads.a, fa), 1e-6);
  EXPECT_LT(oracle::max_relative_error(grads.b, fb), 1e-6);
}

TEST(Gradients, RandomInstancesMatchFiniteDifferences) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 150; ++t) {
    const std::size_t d = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    const std::size_t r = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(4, d))(rng);
    Matrix base = random_matrix(rng, d, d);
    LoraAdapter ad{random_matrix(rng, d, r), random_matrix(rng, r, d), 2.0};
    auto x = random_vector(rng, d);
    auto g = random_vector(rng, d);
    auto grads = adapter_gradients(base, ad, x, g);
    auto [fa, fb] = oracle::finite_difference_gradients(base, ad, x, g);
    ASSERT_LT(oracle::max_relative_error(grads.a, fa), 1e-5);
    ASSERT_LT(oracle::max_relative_error(grads.b, fb), 1e-5);
  }
}

TEST(Gradients, ShapeErrors) {
  auto ad = init_adapter(3, 3, 1, 2.0, 0);
  EXPECT_THROW(adapter_gradients(Matrix(3, 3), ad, std::vector<double>(2), std::vector<double>(3)), DimensionError);
  EXPECT_THROW(adapter_gradients(Matrix(3, 3), ad, std::vector<double>(3), std::vector<double>(4)), DimensionError);
}

TEST(Forward, AgreesWithEffectiveWeight) {
  std::mt19937_64 rng(23);
  Matrix base = random_matrix(rng, 5, 5);
  LoraAdapter ad{random_matrix(rng, 5, 2), random_matrix(rng, 2, 5), 2.0};
  auto x = random_vector(rng, 5);
  auto y = adapted_forward(base, ad, x);
  auto y2 = matvec(effective_weight(base, ad), x);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(y[i], y2[i], 1e-12);
}

TEST(TrainConfig, Defaults) {
  TrainConfig c;
  EXPECT_EQ(c.rank, 64);
  EXPECT_EQ(c.alpha, 2.0);
  EXPECT_EQ(c.dropout, 0.0);
  EXPECT_EQ(c.learning_rate, 4e-5);
  EXPECT_EQ(c.warmup_fraction, 0.10);
  EXPECT_EQ(c.weight_decay, 0.05);
  EXPECT_EQ(c.max_steps, 500);
  EXPECT_EQ(c.clip_norm, 1.0);
  EXPECT_EQ(c.max_seq_len, 2048);
  EXPECT_EQ(c.batch_size, 2);
  EXPECT_EQ(c.seed, 42);
  EXPECT_EQ(c.eval_every, 50);
  EXPECT_EQ(c.checkpoint_every, 100);
  EXPECT_EQ(c.checkpoint_retention, 3);
  EXPECT_EQ(c.warmup_steps(), 50);
  EXPECT_NO_THROW(c.validate());
}

TEST(TrainConfig, TextRoundTripAndErrors) {
  TrainConfig c;
  EXPECT_EQ(parse_config_text(to_config_text(c)), c);
  auto custom = parse_config_text("# override\nrank = 16\nlearning_rate=1e-4  # faster\n\n");
  EXPECT_EQ(custom.rank, 16);
  EXPECT_EQ(custom.learning_rate, 1e-4);
  EXPECT_EQ(custom.alpha, 2.0);
  EXPECT_THROW(parse_config_text("lora_rank = 8"), ValidationError);
  EXPECT_THROW(parse_config_text("rank 8"), ParseError);
  EXPECT_THROW(parse_config_text("rank = eight"), ValidationError);
  EXPECT_THROW(parse_config_text("warmup_fraction = 1.5"), ValidationError);
  EXPECT_THROW(parse_config_text("max_steps = 0"), ValidationError);
}

TEST(Warmup, Fixtures) {
  TrainConfig c;
  EXPECT_EQ(warmup_lr(0, c), 0.0);
  EXPECT_NEAR(warmup_lr(25, c), 2e-5, 1e-18);
  EXPECT_EQ(warmup_lr(50, c), 4e-5);
  EXPECT_EQ(warmup_lr(500, c), 4e-5);
  EXPECT_THROW(warmup_lr(501, c), RangeError);
  EXPECT_THROW(warmup_lr(-1, c), RangeError);
}

TEST(Warmup, MonotoneAndContinuous) {
  TrainConfig c;
  double prev = 0.0;
  for (std::int64_t s = 0; s <= c.max_steps; ++s) {
    double lr = warmup_lr(s, c);
    ASSERT_GE(lr, prev);
    ASSERT_LE(lr - prev, c.learning_rate / 50.0 + 1e-18);
    prev = lr;
  }
  // Warmup that is not an integer number of steps rounds up.
  TrainConfig odd;
  odd.max_steps = 95;  // 9.5 -> 10
  EXPECT_EQ(odd.warmup_steps(), 10);
}

TEST(Clip, Fixtures) {
  EXPECT_EQ(clip_gradient(std::vector<double>{0.3, 0.4}, 1.0), (std::vector<double>{0.3, 0.4}));
  auto c = clip_gradient(std::vector<double>{3.0, 4.0}, 1.0);
  EXPECT_NEAR(c[0], 0.6, 1e-12);
  EXPECT_NEAR(c[1], 0.8, 1e-12);
  EXPECT_EQ(clip_gradient(std::vector<double>{0.0, 0.0}, 1.0), (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(clip_gradient(std::vector<double>{NAN, 1.0}, 1.0), NumericError);
  EXPECT_THROW(clip_gradient(std::vector<double>{INFINITY}, 1.0), NumericError);
}

TEST(Clip, ContractionAndDirection) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 500; ++t) {
    std::size_t n = 1 + rng() % 16;
    auto g = random_vector(rng, n);
    double scale = std::exp(std::uniform_real_distribution<double>(-4.0, 4.0)(rng));
    for (double& v : g) v *= scale;
    auto c = clip_gradient(g, 1.0);
    ASSERT_LE(l2_norm(c), 1.0 + 1e-12);
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += g[i] * c[i];
    ASSERT_NEAR(dot / (l2_norm(g) * l2_norm(c)), 1.0, 1e-12);
  }
}

#include "segblend/adam.hpp"
#include "segblend/cvae.hpp"
#include "segblend/dense.hpp"
#include "segblend/errors.hpp"
#include "segblend/losses.hpp"
#include "segblend/tensor_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

namespace sb = segblend;

namespace {

// Relative error that stays meaningful near zero.
double rel_error(double a, double b) {
  return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
}

// Loss = sum(weights .* output) so dLoss/dOutput = weights.
double weighted_loss(const sb::DenseNet& net, const sb::Matrix& x, const sb::Matrix& w) {
  return sb::forward(net, x).cwiseProduct(w).sum();
}

}  // namespace

TEST(Dense, InitializeIsHeUniformWithZeroBias) {
  sb::Rng rng(7);
  const std::vector<std::size_t> widths{100, 50, 3};
  const auto net = sb::DenseNet::initialize(widths, rng);
  ASSERT_EQ(net.layers.size(), 2u);
  EXPECT_EQ(net.in_dim(), 100u);
  EXPECT_EQ(net.out_dim(), 3u);
  EXPECT_EQ(net.parameter_count(), 100u * 50 + 50 + 50 * 3 + 3);
  const double limit = std::sqrt(6.0 / 100.0);
  EXPECT_LE(net.layers[0].weight.cwiseAbs().maxCoeff(), limit);
  EXPECT_GT(net.layers[0].weight.cwiseAbs().maxCoeff(), 0.9 * limit);
  EXPECT_EQ(net.layers[0].bias.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dense, ForwardMatchesHandComputation) {
  sb::DenseNet net = sb::DenseNet::zeros(std::vector<std::size_t>{2, 2, 1});
  net.layers[0].weight << 1, -1, 2, 1;
  net.layers[0].bias << 0, -10;
  net.layers[1].weight << 3, 5;
  net.layers[1].bias << 1;
  sb::Vector x(2);
  x << 2, 1;
  // hidden pre = (1, -5) -> relu (1, 0); out = 3 + 1
  EXPECT_DOUBLE_EQ(sb::forward(net, x)(0), 4.0);
}

TEST(Dense, RejectsBadShapes) {
  sb::Rng rng(1);
  const auto net = sb::DenseNet::initialize(std::vector<std::size_t>{3, 2}, rng);
  EXPECT_THROW(sb::forward(net, sb::Vector(sb::Vector::Zero(4))), sb::ShapeError);
  EXPECT_THROW(sb::DenseNet::zeros(std::vector<std::size_t>{3}), sb::ShapeError);
  EXPECT_THROW(sb::DenseNet::zeros(std::vector<std::size_t>{3, 0, 2}), sb::ShapeError);
}

TEST(Dense, BinaryForwardEqualsDenseForward) {
  sb::Rng rng(11);
  const auto net = sb::DenseNet::initialize(std::vector<std::size_t>{20, 8, 5}, rng);
  sb::BinaryBatch batch{20, {{0, 3, 19}, {}, {5, 6, 7, 8}}};
  const sb::Matrix a = sb::forward(net, batch);
  const sb::Matrix b = sb::forward(net, batch.to_dense());
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);

  const sb::Matrix w = sb::Matrix::Random(5, 3);
  sb::ForwardCache cb, cd;
  sb::forward(net, batch, &cb);
  sb::forward(net, batch.to_dense(), &cd);
  const auto gb = sb::backward(net, cb, w);
  const auto gd = sb::backward(net, cd, w);
  for (std::size_t i = 0; i < gb.weight.size(); ++i) {
    EXPECT_LT((gb.weight[i] - gd.weight[i]).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((gb.bias[i] - gd.bias[i]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Dense, FloatAndDoubleNetsAgree) {
  sb::Rng a(5), b(5);
  const std::vector<std::size_t> widths{6, 4, 2};
  const auto d = sb::DenseNet::initialize(widths, a);
  const auto f = sb::BasicDenseNet<float>::initialize(widths, b);
  EXPECT_TRUE(f.cast<double>().cast<float>() == f);
  EXPECT_LT((d.layers[0].weight.cast<float>() - f.layers[0].weight).cwiseAbs().maxCoeff(), 1e-7f);
}

// Twenty randomized nets: every weight, bias and input gradient against
// central differences.
TEST(Dense, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(20201015);
  std::uniform_int_distribution<std::size_t> width(1, 7);
  std::uniform_int_distribution<std::size_t> depth(1, 4);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> widths{width(rng)};
    const std::size_t layers = depth(rng);
    for (std::size_t i = 0; i < layers; ++i) widths.push_back(width(rng));
    sb::DenseNet net = sb::DenseNet::initialize(widths, rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& l : net.layers) {
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.1 * normal(rng);
    }
    const auto batch = static_cast<Eigen::Index>(1 + trial % 4);
    sb::Matrix x(static_cast<Eigen::Index>(widths.front()), batch);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    sb::Matrix w(static_cast<Eigen::Index>(widths.back()), batch);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);

    sb::ForwardCache cache;
    sb::forward(net, x, &cache);
    sb::Matrix dx;
    const auto grads = sb::backward(net, cache, w, &dx);

    auto params = sb::parameter_blocks(net);
    const auto analytic = sb::gradient_blocks(grads);
    for (std::size_t b = 0; b < params.size(); ++b) {
      for (std::size_t i = 0; i < params[b].size(); ++i) {
        const double saved = params[b][i];
        params[b][i] = saved + h;
        const double up = weighted_loss(net, x, w);
        params[b][i] = saved - h;
        const double down = weighted_loss(net, x, w);
        params[b][i] = saved;
        const double numeric = (up - down) / (2 * h);
        const double err = rel_error(analytic[b][i], numeric);
        worst = std::max(worst, std::abs(analytic[b][i] - numeric) < 1e-9 ? 0.0 : err);
      }
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      sb::Matrix xp = x, xm = x;
      xp.data()[i] += h;
      xm.data()[i] -= h;
      const double numeric = (weighted_loss(net, xp, w) - weighted_loss(net, xm, w)) / (2 * h);
      const double err = rel_error(dx.data()[i], numeric);
      worst = std::max(worst, std::abs(dx.data()[i] - numeric) < 1e-9 ? 0.0 : err);
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Losses, KlOfUnitShiftIsHalf) {
  sb::GaussianParams g{sb::Vector(2), sb::Vector(sb::Vector::Zero(2))};
  g.mu << 1, 0;
  const auto kl = sb::kl_standard_normal(g);
  EXPECT_DOUBLE_EQ(kl.value, 0.5);
  EXPECT_DOUBLE_EQ(kl.grad_mu(0), 1.0);
  EXPECT_DOUBLE_EQ(kl.grad_logvar(0), 0.0);
}

TEST(Losses, KlOfStandardNormalIsZero) {
  sb::GaussianParams g{sb::Vector::Zero(4), sb::Vector::Zero(4)};
  EXPECT_DOUBLE_EQ(sb::kl_standard_normal(g).value, 0.0);
}

TEST(Losses, CrossEntropyOfUniformLogits) {
  const sb::Vector logits = sb::Vector::Zero(4);
  const auto ce = sb::softmax_cross_entropy(logits, 2);
  EXPECT_NEAR(ce.loss, std::log(4.0), 1e-12);
  EXPECT_NEAR(ce.grad(2), 0.25 - 1.0, 1e-12);
  EXPECT_NEAR(ce.grad(0), 0.25, 1e-12);
  EXPECT_THROW(sb::softmax_cross_entropy(logits, 4), sb::PreconditionError);
}

TEST(Losses, SoftmaxIsStableForHugeLogits) {
  sb::Vector logits(3);
  logits << 1000, 1000, -1000;
  const sb::Vector p = sb::softmax(logits);
  EXPECT_NEAR(p(0), 0.5, 1e-12);
  EXPECT_NEAR(p(2), 0.0, 1e-12);
}

TEST(Losses, ReparameterizeUsesHalfLogvar) {
  sb::GaussianParams g{sb::Vector(1), sb::Vector(1)};
  g.mu << 1;
  g.logvar << std::log(4.0);
  sb::Vector eps(1);
  eps << 1.5;
  EXPECT_NEAR(sb::reparameterize(g, eps)(0), 1 + 2 * 1.5, 1e-12);
}

TEST(Adam, FirstStepMovesEachParameterByTheLearningRate) {
  std::vector<double> p{1.0, -2.0, 3.0};
  const std::vector<double> g{0.5, -7.0, 1e-3};
  const std::vector<std::size_t> sizes{3};
  sb::AdamState state(sizes);
  std::vector<std::span<double>> params{std::span<double>(p)};
  std::vector<std::span<const double>> grads{std::span<const double>(g)};
  sb::adam_step<double>(params, grads, state, 1e-3);
  EXPECT_NEAR(p[0], 1.0 - 1e-3, 1e-9);
  EXPECT_NEAR(p[1], -2.0 + 1e-3, 1e-9);
  EXPECT_NEAR(p[2], 3.0 - 1e-3, 1e-7);
  EXPECT_EQ(state.step(), 1u);
}

TEST(Adam, MinimizesAQuadratic) {
  std::vector<float> p{5.0f};
  const std::vector<std::size_t> sizes{1};
  sb::BasicAdamState<float> state(sizes);
  for (int i = 0; i < 3000; ++i) {
    std::vector<float> g{2.0f * (p[0] - 1.5f)};
    std::vector<std::span<float>> params{std::span<float>(p)};
    std::vector<std::span<const float>> grads{std::span<const float>(g)};
    state.update(params, grads, 0.01);
  }
  EXPECT_NEAR(p[0], 1.5f, 1e-2f);
}

TEST(Adam, RejectsMismatchedBlocks) {
  std::vector<double> p(3), g(2);
  const std::vector<std::size_t> sizes{3};
  sb::AdamState state(sizes);
  std::vector<std::span<double>> params{std::span<double>(p)};
  std::vector<std::span<const double>> grads{std::span<const double>(g)};
  EXPECT_THROW(sb::adam_step<double>(params, grads, state, 1e-3), sb::ShapeError);
}

TEST(Schedule, FactorDecay) {
  sb::LearningRateSchedule s;
  EXPECT_DOUBLE_EQ(s.rate_at(0), 1e-3);
  EXPECT_DOUBLE_EQ(s.rate_at(2499), 1e-3);
  EXPECT_NEAR(s.rate_at(2500), 1e-5, 1e-18);
  EXPECT_NEAR(s.rate_at(5000), 1e-7, 1e-20);
}

TEST(Schedule, DecrementDecayClampsAtZero) {
  sb::LearningRateSchedule s{1e-3, 0.25, 10, sb::DecayMode::Decrement};
  EXPECT_DOUBLE_EQ(s.rate_at(10), 0.75e-3);
  EXPECT_DOUBLE_EQ(s.rate_at(100), 0.0);
  EXPECT_EQ(sb::parse_decay_mode("factor"), sb::DecayMode::Factor);
  EXPECT_THROW(sb::parse_decay_mode("cosine"), sb::ConfigError);
}

TEST(TensorIo, RoundTripIsBitExact) {
  sb::Rng rng(3);
  const auto net = sb::DenseNet::initialize(std::vector<std::size_t>{5, 4, 3}, rng);
  sb::TensorContainer c;
  c.metadata_json = R"({"k":1})";
  sb::append_net(c, "enc", net);
  const auto path = std::filesystem::temp_directory_path() / "segblend_tensor_io_test.bin";
  sb::write_tensor_container(path, c);
  const auto back = sb::read_tensor_container(path);
  EXPECT_EQ(back, c);
  EXPECT_TRUE(sb::extract_net(back, "enc", 2) == net);
  EXPECT_THROW(back.get("missing"), sb::Error);
  std::filesystem::remove(path);
}

TEST(TensorIo, TruncatedFileIsAFormatError) {
  sb::TensorContainer c;
  c.tensors.push_back({"t", 2, 2, {1, 2, 3, 4}});
  const auto path = std::filesystem::temp_directory_path() / "segblend_tensor_trunc.bin";
  sb::write_tensor_container(path, c);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  EXPECT_THROW(sb::read_tensor_container(path), sb::FormatError);
  std::filesystem::remove(path);
}

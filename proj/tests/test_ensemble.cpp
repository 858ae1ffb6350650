#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "examl/ensemble.hpp"
#include "test_support.hpp"

using namespace examl;
using examl::testing::random_matrix;

namespace {

// A member whose output is the constant `value` for any input: beta scales the
// hidden unit tanh(0·x + atanh(0.5)) = 0.5.
ElmModel constant_member(double value, Eigen::Index inputs = 2) {
  ElmModel m;
  m.weights = Matrix::Zero(inputs, 1);
  m.biases = Vector::Constant(1, std::atanh(0.5));
  m.beta = Matrix::Constant(1, 1, 2.0 * value);
  return m;
}

double mse(const Matrix& a, const Matrix& b) { return (a - b).array().square().mean(); }

}  // namespace

TEST(MemberSeeds, DistinctForThousandMembers) {
  for (std::uint64_t base : {0ULL, 1ULL, 0xdeadbeefULL}) {
    std::set<std::uint64_t> seen;
    for (std::size_t i = 0; i <= 1000; ++i) seen.insert(derive_member_seed(base, i));
    EXPECT_EQ(seen.size(), 1001u);
  }
}

TEST(Averaging, ConstantMembers) {
  Matrix X = Matrix::Random(4, 2);
  std::vector<ElmModel> three(3, constant_member(3.0));
  EXPECT_LT((average_member_scores(three, X).array() - 3.0).abs().maxCoeff(), 1e-12);
  Matrix mixed = average_member_scores({constant_member(1.0), constant_member(2.0)}, X);
  EXPECT_NEAR(mixed(0, 0), 1.5, 1e-12);
}

TEST(Averaging, SingleMemberIsItsRawPrediction) {
  std::mt19937_64 rng(2);
  Matrix X = random_matrix(rng, 30, 3), Y = random_matrix(rng, 30, 2);
  auto members = train_ensemble(X, Y, ElmConfig{12, 1e-3, Activation::tanh, 1.0, 0}, 1, 55);
  EXPECT_EQ(average_member_scores(members, X), predict_elm(members[0], X));
}

TEST(Averaging, IndependentOfMemberOrder) {
  std::mt19937_64 rng(3);
  Matrix X = random_matrix(rng, 40, 3), Y = random_matrix(rng, 40, 2);
  auto members = train_ensemble(X, Y, ElmConfig{10, 1e-4, Activation::tanh, 1.0, 0}, 6, 9);
  const Matrix reference = average_member_scores(members, X);
  std::mt19937_64 shuffle_rng(4);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(members.begin(), members.end(), shuffle_rng);
    EXPECT_EQ(average_member_scores(members, X), reference);
  }
}

TEST(TrainEnsemble, MembersUseDerivedSeedsAndSharedConfig) {
  std::mt19937_64 rng(5);
  Matrix X = random_matrix(rng, 25, 2), Y = random_matrix(rng, 25, 1);
  ElmConfig cfg{8, 1e-2, Activation::tanh, 1.5, 0};
  auto members = train_ensemble(X, Y, cfg, 3, 77);
  for (std::size_t i = 0; i < 3; ++i) {
    ElmConfig c = cfg;
    c.seed = derive_member_seed(77, i);
    const auto solo = train_elm(X, Y, c);
    EXPECT_EQ(members[i].weights, solo.weights);
    EXPECT_EQ(members[i].beta, solo.beta);
  }
  EXPECT_NE(members[0].weights, members[1].weights);
  EXPECT_THROW(train_ensemble(X, Y, cfg, 0, 77), InvalidArgument);
}

TEST(TrainEnsemble, ThreadCountDoesNotChangeResults) {
  std::mt19937_64 rng(6);
  Matrix X = random_matrix(rng, 50, 3), Y = random_matrix(rng, 50, 2);
  ElmConfig cfg{20, 1e-5, Activation::tanh, 1.0, 0};
  auto serial = train_ensemble(X, Y, cfg, 5, 1, 1);
  auto threaded = train_ensemble(X, Y, cfg, 5, 1, 4);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(serial[i].beta, threaded[i].beta);
}

TEST(TrainEnsemble, SameSeedSamePredictions) {
  std::mt19937_64 rng(7);
  Matrix X = random_matrix(rng, 30, 2), Y = random_matrix(rng, 30, 1);
  ElmConfig cfg{16, 1e-6, Activation::tanh, 1.0, 0};
  const Matrix a = average_member_scores(train_ensemble(X, Y, cfg, 4, 11), X);
  const Matrix b = average_member_scores(train_ensemble(X, Y, cfg, 4, 11), X);
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a(i), b(i));
}

TEST(TrainEnsemble, EnsembleMseNeverExceedsMeanMemberMse) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix X = random_matrix(rng, 40, 3), Y = random_matrix(rng, 40, 2);
    Matrix Xt = random_matrix(rng, 25, 3), Yt = random_matrix(rng, 25, 2);
    auto members = train_ensemble(X, Y, ElmConfig{15, 1e-3, Activation::tanh, 1.0, 0}, 5,
                                  static_cast<std::uint64_t>(trial));
    double mean_member = 0.0;
    for (const auto& m : members) mean_member += mse(predict_elm(m, Xt), Yt) / 5.0;
    EXPECT_LE(mse(average_member_scores(members, Xt), Yt), mean_member + 1e-12);
  }
}

TEST(TrainEnsemble, SinEnsembleNoWorseThanWorstMember) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  Matrix X(200, 1), Y(200, 1);
  for (int i = 0; i < 200; ++i) {
    X(i, 0) = u(rng);
    Y(i, 0) = std::sin(X(i, 0));
  }
  auto members = train_ensemble(X, Y, ElmConfig{50, 1e-6, Activation::tanh, 2.0, 0}, 7, 3);
  double worst = 0.0;
  for (const auto& m : members) worst = std::max(worst, std::sqrt(mse(predict_elm(m, X), Y)));
  EXPECT_LE(std::sqrt(mse(average_member_scores(members, X), Y)), worst + 1e-9);
}

TEST(Argmax, TiesGoToLowestIndex) {
  EXPECT_EQ(argmax_rows(Matrix{{0.5, 0.5}, {0.1, 0.9}, {0.3, 0.3}}), (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_EQ(argmax_rows(Matrix{{-1, 2, 2}}), (std::vector<std::size_t>{1}));
}

TEST(Predict, TaskMismatchIsInvalidState) {
  EnsembleModel model;
  model.members = {constant_member(3.0)};
  model.scaler = standardize_fit(Matrix{{0, 0}, {1, 1}});
  model.task = TaskKind::regression;
  Matrix X = Matrix::Zero(2, 2);
  EXPECT_THROW(predict_labels(model, X), InvalidState);
  auto values = predict_regression(model, X);
  EXPECT_NEAR(values[0], 3.0, 1e-12);
  model.target_mean = 10.0;
  model.target_std = 2.0;
  EXPECT_NEAR(predict_regression(model, X)[1], 16.0, 1e-12);
  model.task = TaskKind::classification;
  EXPECT_THROW(predict_regression(model, X), InvalidState);
  EXPECT_THROW(predict_scores(model, Matrix::Zero(2, 3)), ShapeError);
}

TEST(Predict, LabelsDecodeThroughCodec) {
  EnsembleModel model;
  ElmModel m;
  m.weights = Matrix{{1.0}};
  m.biases = Vector::Zero(1);
  m.beta = Matrix{{1.0, -1.0}};
  model.members = {m};
  model.scaler = standardize_fit(Matrix{{-1.0}, {1.0}});
  model.codec = LabelCodec::from_labels({"neg", "pos"});
  model.validate();
  EXPECT_EQ(predict_labels(model, Matrix{{3.0}, {-3.0}}), (std::vector<std::string>{"neg", "pos"}));
}

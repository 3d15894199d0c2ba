#include "segblend/classifier.hpp"
#include "segblend/errors.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

namespace sb = segblend;

namespace {

// Label = value of cell 2, other cells are noise.
void make_dataset(std::mt19937_64& rng, std::size_t n, std::vector<sb::CategoricalSample>& x, std::vector<int>& y) {
  std::uniform_int_distribution<int> cat(0, 2);
  for (std::size_t i = 0; i < n; ++i) {
    sb::CategoricalSample s(6);
    for (auto& v : s) v = static_cast<std::uint8_t>(cat(rng));
    x.push_back(s);
    y.push_back(10 + s[2]);
  }
}

}  // namespace

TEST(Forest, LearnsAnInformativeCell) {
  std::mt19937_64 data_rng(1);
  std::vector<sb::CategoricalSample> x;
  std::vector<int> y;
  make_dataset(data_rng, 300, x, y);
  sb::Rng rng(2);
  const auto forest = sb::Forest::train(x, 3, y, {}, rng);
  EXPECT_EQ(forest.classes(), (std::vector<int>{10, 11, 12}));
  EXPECT_EQ(forest.trees().size(), 100u);
  std::vector<sb::CategoricalSample> test_x;
  std::vector<int> test_y;
  make_dataset(data_rng, 200, test_x, test_y);
  int correct = 0;
  for (std::size_t i = 0; i < test_x.size(); ++i) correct += forest.predict(test_x[i]) == test_y[i];
  EXPECT_GE(correct, 195);
  const auto proba = forest.predict_proba(test_x[0]);
  double sum = 0;
  for (double p : proba) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Forest, DeterministicAndSerializable) {
  std::mt19937_64 data_rng(3);
  std::vector<sb::CategoricalSample> x;
  std::vector<int> y;
  make_dataset(data_rng, 80, x, y);
  sb::ForestConfig cfg;
  cfg.n_trees = 10;
  sb::Rng a(9), b(9);
  const auto fa = sb::Forest::train(x, 3, y, cfg, a);
  const auto fb = sb::Forest::train(x, 3, y, cfg, b);
  EXPECT_EQ(fa, fb);
  EXPECT_EQ(sb::Forest::from_text(fa.to_text()), fa);
  EXPECT_THROW(sb::Forest::from_text("segblend-forest 2\n"), sb::FormatError);
}

TEST(Forest, NeedsTwoClasses) {
  std::vector<sb::CategoricalSample> x{{0}, {1}};
  std::vector<int> y{4, 4};
  sb::Rng rng(1);
  EXPECT_THROW(sb::Forest::train(x, 2, y, {}, rng), sb::PreconditionError);
}

TEST(Forest, PredictTiesGoToTheLowestClass) {
  // Identical inputs with different labels: every leaf is 50/50.
  std::vector<sb::CategoricalSample> x{{0}, {0}};
  std::vector<int> y{7, 3};
  sb::ForestConfig cfg;
  cfg.n_trees = 1;
  cfg.bootstrap = false;
  sb::Rng rng(1);
  const auto f = sb::Forest::train(x, 2, y, cfg, rng);
  EXPECT_EQ(f.predict({0}), 3);
}

TEST(Forest, StratifiedFoldsBalanceEveryClass) {
  std::vector<int> labels;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 10 * (c + 1); ++i) labels.push_back(c);
  }
  sb::Rng rng(4);
  const auto folds = sb::stratified_folds(labels, 5, rng);
  std::map<std::pair<std::size_t, int>, int> count;
  for (std::size_t i = 0; i < labels.size(); ++i) count[{folds[i], labels[i]}]++;
  for (std::size_t f = 0; f < 5; ++f) {
    for (int c = 0; c < 3; ++c) EXPECT_EQ((count[{f, c}]), 2 * (c + 1));
  }
  EXPECT_THROW(sb::stratified_folds(labels, 1, rng), sb::PreconditionError);
  EXPECT_THROW(sb::stratified_folds(labels, labels.size() + 1, rng), sb::PreconditionError);
}

TEST(Forest, CrossValidationOfASeparableProblem) {
  std::mt19937_64 data_rng(5);
  std::vector<sb::CategoricalSample> x;
  std::vector<int> y;
  make_dataset(data_rng, 150, x, y);
  sb::ForestConfig cfg;
  cfg.n_trees = 30;
  sb::Rng rng(6);
  EXPECT_GE(sb::cross_validate(x, 3, y, 5, cfg, rng), 0.95);
}

TEST(SegmentClassifier, EncodesUnknownTilesAsZero) {
  const auto s = sb::encode_grid(sb::TileGrid(1, 3, "AZB"), "AB");
  EXPECT_EQ(s, (sb::CategoricalSample{0, sb::kUnknownCategory, 1}));
}

TEST(SegmentClassifier, DirectionalClassifierOnLodeRunner) {
  const auto corpus = sb::test::fixture_corpus(sb::GameId::LodeRunner);
  sb::ForestConfig cfg;
  cfg.n_trees = 20;
  sb::Rng rng(1);
  const auto clf = sb::train_directional_classifier(corpus, cfg, rng);
  int correct = 0;
  for (const auto& s : corpus.segments) correct += clf.predict_directional(s.grid) == s.label;
  EXPECT_GE(correct, static_cast<int>(corpus.size() * 9 / 10));
  EXPECT_THROW(clf.encode(sb::TileGrid(2, 2, '.')), sb::ShapeError);

  const auto dir = sb::test::scratch_dir("classifier");
  clf.save(dir / "lr.forest");
  EXPECT_EQ(sb::SegmentClassifier::load(dir / "lr.forest"), clf);
}

TEST(SegmentClassifier, GameClassifierSeparatesGames) {
  const std::vector<sb::Corpus> corpora{sb::test::fixture_corpus(sb::GameId::Metroid),
                                        sb::test::fixture_corpus(sb::GameId::MegaMan)};
  sb::ForestConfig cfg;
  cfg.n_trees = 20;
  sb::Rng rng(2);
  const auto clf = sb::train_game_classifier(corpora, cfg, rng);
  for (std::size_t g = 0; g < 2; ++g) {
    int correct = 0;
    for (const auto& s : corpora[g].segments) correct += clf.predict(s.grid) == static_cast<int>(g);
    EXPECT_GE(correct, static_cast<int>(corpora[g].size() * 9 / 10));
  }
  const std::vector<sb::Corpus> mismatched{sb::test::fixture_corpus(sb::GameId::Zelda), corpora[0]};
  EXPECT_THROW(sb::train_game_classifier(mismatched, cfg, rng), sb::ShapeError);
}

TEST(Match, ExactAdmissibleNone) {
  const auto l = [](unsigned i) { return sb::DirectionalLabel::from_index(i); };
  EXPECT_EQ(sb::match(l(9), l(9)), sb::MatchKind::Exact);
  EXPECT_EQ(sb::match(l(11), l(9)), sb::MatchKind::Admissible);
  EXPECT_EQ(sb::match(l(8), l(9)), sb::MatchKind::None);
  EXPECT_EQ(sb::match(l(15), l(0)), sb::MatchKind::Admissible);
  EXPECT_EQ(sb::to_string(sb::MatchKind::Exact), "exact");
}

TEST(Match, InOutSplitCoversAllLabels) {
  const auto corpus = sb::test::fixture_corpus(sb::GameId::LodeRunner);
  const auto split = sb::in_out_split(corpus);
  EXPECT_EQ(split.in.size(), 4u);
  EXPECT_EQ(split.out.size(), 12u);
  for (const auto& l : split.in) EXPECT_TRUE(sb::unique_label_indices(corpus).count(l.index()));
}

#pragma once

#include "segblend/corpus.hpp"
#include "segblend/seeding.hpp"
#include "segblend/tiles.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace segblend {

// A sample is a vector of categorical cells; the forest sees it as the
// flattened one-hot encoding, feature f = cell * categories + value.
// Cells holding kUnknownCategory have every one-hot feature at 0.
using CategoricalSample = std::vector<std::uint8_t>;
inline constexpr std::uint8_t kUnknownCategory = 0xFF;

struct ForestConfig {
  std::size_t n_trees = 100;
  // 0 means floor(sqrt(feature count)).
  std::size_t max_features = 0;
  bool bootstrap = true;
};

struct TreeNode {
  // Split nodes: feature >= 0, samples with the feature set go right.
  std::int64_t feature = -1;
  std::int32_t left = -1;
  std::int32_t right = -1;
  // Leaves: class distribution of the training samples that reached it.
  std::vector<double> distribution;

  bool leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  bool operator==(const DecisionTree&) const = default;
};

class Forest {
 public:
  // CART trees with Gini impurity, unlimited depth, bootstrap samples and a
  // random feature subset per split. Needs at least two distinct labels.
  static Forest train(std::span<const CategoricalSample> samples, std::size_t categories,
                      std::span<const int> labels, const ForestConfig& config, Rng& rng);

  // Mean of the trees' leaf distributions, indexed like classes().
  std::vector<double> predict_proba(const CategoricalSample& sample) const;
  // Highest mean probability; ties go to the lowest class index.
  int predict(const CategoricalSample& sample) const;

  const std::vector<int>& classes() const { return classes_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  std::size_t cells() const { return cells_; }
  std::size_t categories() const { return categories_; }

  std::string to_text() const;
  static Forest from_text(std::string_view text);

  bool operator==(const Forest&) const = default;

 private:
  std::vector<int> classes_;
  std::vector<DecisionTree> trees_;
  std::size_t cells_ = 0;
  std::size_t categories_ = 0;
};

// Mean accuracy over k folds. Folds are stratified: each class's samples
// are shuffled and dealt round-robin, continuing across classes.
double cross_validate(std::span<const CategoricalSample> samples, std::size_t categories,
                      std::span<const int> labels, std::size_t k, const ForestConfig& config, Rng& rng);

// Fold index per sample for cross_validate.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k, Rng& rng);

// Forest over one-hot tile grids with a fixed vocabulary and segment shape.
class SegmentClassifier {
 public:
  SegmentClassifier() = default;
  SegmentClassifier(std::string vocabulary, std::size_t rows, std::size_t cols, Forest forest);

  // Shape mismatches throw ShapeError; tiles outside the vocabulary encode as
  // all-zero cells.
  CategoricalSample encode(const TileGrid& grid) const;
  int predict(const TileGrid& grid) const;
  DirectionalLabel predict_directional(const TileGrid& grid) const;

  const std::string& vocabulary() const { return vocabulary_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Forest& forest() const { return forest_; }

  void save(const std::filesystem::path& path) const;
  static SegmentClassifier load(const std::filesystem::path& path);

  bool operator==(const SegmentClassifier&) const = default;

 private:
  std::string vocabulary_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Forest forest_;
  std::array<std::uint8_t, 256> index_{};
  void build_index();
};

CategoricalSample encode_grid(const TileGrid& grid, std::string_view vocabulary);

// Classifier for directional label indices (8U + 4D + 2L + R).
SegmentClassifier train_directional_classifier(const Corpus& corpus, const ForestConfig& config, Rng& rng);

// Classifier for game membership; class i is corpora[i]'s game. All corpora
// must share a segment shape.
SegmentClassifier train_game_classifier(std::span<const Corpus> corpora, const ForestConfig& config, Rng& rng);

enum class MatchKind { None, Admissible, Exact };

std::string_view to_string(MatchKind kind);

// Exact: equal bits. Admissible: every open side of the condition is open in
// the prediction.
MatchKind match(DirectionalLabel predicted, DirectionalLabel conditioned);

struct LabelSplit {
  std::vector<DirectionalLabel> in;
  std::vector<DirectionalLabel> out;
};

// IN = directional labels present in the corpus, OUT = the rest (index order).
LabelSplit in_out_split(const Corpus& corpus);

}  // namespace segblend

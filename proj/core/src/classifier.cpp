#include "segblend/classifier.hpp"

#include "segblend/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace segblend {

namespace {

struct Builder {
  std::span<const CategoricalSample> samples;
  std::span<const int> y;  // class indices
  std::size_t n_classes = 0;
  std::size_t cells = 0;
  std::size_t categories = 0;
  std::size_t max_features = 0;
  std::vector<std::uint32_t> perm;

  static double gini_sum(const std::vector<std::size_t>& counts, std::size_t n) {
    // n * gini, so child impurities add directly.
    if (n == 0) return 0.0;
    double sq = 0.0;
    for (std::size_t c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
    return static_cast<double>(n) - sq / static_cast<double>(n);
  }

  bool has(std::size_t sample, std::uint32_t feature) const {
    return samples[sample][feature / categories] == feature % categories;
  }

  DecisionTree build(std::vector<std::size_t> idx, Rng& rng) {
    DecisionTree tree;
    struct Task {
      std::size_t begin, end;
      std::int32_t node;
    };
    tree.nodes.emplace_back();
    std::vector<Task> stack{{0, idx.size(), 0}};
    std::vector<std::size_t> counts(n_classes), right(n_classes);
    const auto n_features = static_cast<std::uint32_t>(perm.size());
    while (!stack.empty()) {
      const Task t = stack.back();
      stack.pop_back();
      const std::size_t n = t.end - t.begin;
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = t.begin; i < t.end; ++i) ++counts[static_cast<std::size_t>(y[idx[i]])];
      const double parent = gini_sum(counts, n);

      std::int64_t best_feature = -1;
      double best = 0.0;
      if (parent > 1e-12) {
        std::size_t evaluated = 0;
        for (std::uint32_t i = 0; i < n_features; ++i) {
          if (evaluated >= max_features && best_feature >= 0) break;
          std::uniform_int_distribution<std::uint32_t> pick(i, n_features - 1);
          std::swap(perm[i], perm[pick(rng)]);
          const std::uint32_t f = perm[i];
          std::fill(right.begin(), right.end(), 0);
          std::size_t n_right = 0;
          for (std::size_t k = t.begin; k < t.end; ++k) {
            if (has(idx[k], f)) {
              ++right[static_cast<std::size_t>(y[idx[k]])];
              ++n_right;
            }
          }
          // Constant features do not count toward the feature budget.
          if (n_right == 0 || n_right == n) continue;
          ++evaluated;
          std::vector<std::size_t> left(n_classes);
          for (std::size_t c = 0; c < n_classes; ++c) left[c] = counts[c] - right[c];
          const double impurity = gini_sum(left, n - n_right) + gini_sum(right, n_right);
          if (best_feature < 0 || impurity < best) {
            best = impurity;
            best_feature = f;
          }
        }
      }

      if (best_feature < 0) {
        TreeNode& leaf = tree.nodes[static_cast<std::size_t>(t.node)];
        leaf.distribution.resize(n_classes);
        for (std::size_t c = 0; c < n_classes; ++c) {
          leaf.distribution[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
        }
        continue;
      }
      const auto f = static_cast<std::uint32_t>(best_feature);
      const auto mid = std::stable_partition(idx.begin() + static_cast<std::ptrdiff_t>(t.begin),
                                             idx.begin() + static_cast<std::ptrdiff_t>(t.end),
                                             [&](std::size_t s) { return !has(s, f); });
      const auto split = static_cast<std::size_t>(mid - idx.begin());
      const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[static_cast<std::size_t>(t.node)];
      node.feature = best_feature;
      node.left = left_id;
      node.right = left_id + 1;
      stack.push_back({split, t.end, left_id + 1});
      stack.push_back({t.begin, split, left_id});
    }
    return tree;
  }
};

const TreeNode& leaf_for(const DecisionTree& tree, const CategoricalSample& x, std::size_t categories) {
  std::size_t i = 0;
  while (!tree.nodes[i].leaf()) {
    const auto f = static_cast<std::size_t>(tree.nodes[i].feature);
    const bool set = x[f / categories] == f % categories;
    i = static_cast<std::size_t>(set ? tree.nodes[i].right : tree.nodes[i].left);
  }
  return tree.nodes[i];
}

}  // namespace

Forest Forest::train(std::span<const CategoricalSample> samples, std::size_t categories,
                     std::span<const int> labels, const ForestConfig& config, Rng& rng) {
  if (samples.empty()) throw PreconditionError("cannot train a forest on no samples");
  if (samples.size() != labels.size()) throw ShapeError("forest samples and labels differ in count");
  if (categories == 0 || categories >= kUnknownCategory) throw ShapeError("bad category count for forest");
  if (config.n_trees == 0) throw PreconditionError("a forest needs at least one tree");
  Forest forest;
  forest.cells_ = samples[0].size();
  forest.categories_ = categories;
  for (const auto& s : samples) {
    if (s.size() != forest.cells_) throw ShapeError("forest samples differ in length");
  }
  forest.classes_.assign(labels.begin(), labels.end());
  std::sort(forest.classes_.begin(), forest.classes_.end());
  forest.classes_.erase(std::unique(forest.classes_.begin(), forest.classes_.end()), forest.classes_.end());
  if (forest.classes_.size() < 2) throw PreconditionError("forest training needs at least two distinct labels");

  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y[i] = static_cast<int>(std::lower_bound(forest.classes_.begin(), forest.classes_.end(), labels[i]) -
                            forest.classes_.begin());
  }
  Builder builder;
  builder.samples = samples;
  builder.y = y;
  builder.n_classes = forest.classes_.size();
  builder.cells = forest.cells_;
  builder.categories = categories;
  const std::size_t n_features = forest.cells_ * categories;
  builder.max_features = config.max_features != 0
                             ? config.max_features
                             : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(n_features))));
  builder.perm.resize(n_features);

  const std::size_t n = samples.size();
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    Rng tree_rng(rng());
    std::vector<std::size_t> idx(n);
    if (config.bootstrap) {
      std::uniform_int_distribution<std::size_t> draw(0, n - 1);
      for (auto& i : idx) i = draw(tree_rng);
    } else {
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    }
    for (std::uint32_t f = 0; f < n_features; ++f) builder.perm[f] = f;
    forest.trees_.push_back(builder.build(std::move(idx), tree_rng));
  }
  return forest;
}

std::vector<double> Forest::predict_proba(const CategoricalSample& sample) const {
  if (sample.size() != cells_) throw ShapeError("sample length does not match the forest");
  std::vector<double> p(classes_.size(), 0.0);
  for (const auto& tree : trees_) {
    const auto& d = leaf_for(tree, sample, categories_).distribution;
    for (std::size_t c = 0; c < p.size(); ++c) p[c] += d[c];
  }
  for (double& v : p) v /= static_cast<double>(trees_.size());
  return p;
}

int Forest::predict(const CategoricalSample& sample) const {
  const auto p = predict_proba(sample);
  std::size_t best = 0;
  for (std::size_t c = 1; c < p.size(); ++c) {
    if (p[c] > p[best]) best = c;
  }
  return classes_[best];
}

std::string Forest::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "segblend-forest 1\n";
  out << "shape " << cells_ << ' ' << categories_ << '\n';
  out << "classes " << classes_.size();
  for (int c : classes_) out << ' ' << c;
  out << "\ntrees " << trees_.size() << '\n';
  for (const auto& tree : trees_) {
    out << "tree " << tree.nodes.size() << '\n';
    for (const auto& node : tree.nodes) {
      if (node.leaf()) {
        out << 'L';
        for (double d : node.distribution) out << ' ' << d;
      } else {
        out << "S " << node.feature << ' ' << node.left << ' ' << node.right;
      }
      out << '\n';
    }
  }
  return out.str();
}

Forest Forest::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto expect = [&](const char* word) {
    std::string got;
    if (!(in >> got) || got != word) throw FormatError(std::string("forest text: expected '") + word + "'");
  };
  Forest forest;
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "segblend-forest" || version != 1) {
    throw FormatError("not a forest file");
  }
  expect("shape");
  in >> forest.cells_ >> forest.categories_;
  expect("classes");
  std::size_t n_classes = 0;
  in >> n_classes;
  forest.classes_.resize(n_classes);
  for (int& c : forest.classes_) in >> c;
  expect("trees");
  std::size_t n_trees = 0;
  in >> n_trees;
  if (!in) throw FormatError("forest header is malformed");
  for (std::size_t t = 0; t < n_trees; ++t) {
    expect("tree");
    std::size_t n_nodes = 0;
    in >> n_nodes;
    DecisionTree tree;
    tree.nodes.resize(n_nodes);
    for (auto& node : tree.nodes) {
      std::string kind;
      in >> kind;
      if (kind == "L") {
        node.distribution.resize(n_classes);
        for (double& d : node.distribution) in >> d;
      } else if (kind == "S") {
        in >> node.feature >> node.left >> node.right;
        if (node.left < 0 || node.right < 0 || static_cast<std::size_t>(node.right) >= n_nodes) {
          throw FormatError("forest node has a bad child index");
        }
      } else {
        throw FormatError("forest node kind '" + kind + "' is unknown");
      }
    }
    if (!in) throw FormatError("forest tree " + std::to_string(t) + " is truncated");
    forest.trees_.push_back(std::move(tree));
  }
  return forest;
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k, Rng& rng) {
  if (k < 2) throw PreconditionError("cross validation needs k >= 2");
  if (k > labels.size()) throw PreconditionError("more folds than samples");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<std::size_t> fold(labels.size());
  std::size_t next = 0;
  for (auto& [label, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) fold[i] = next++ % k;
  }
  return fold;
}

double cross_validate(std::span<const CategoricalSample> samples, std::size_t categories,
                      std::span<const int> labels, std::size_t k, const ForestConfig& config, Rng& rng) {
  if (samples.size() != labels.size()) throw ShapeError("samples and labels differ in count");
  const auto fold = stratified_folds(labels, k, rng);
  double total = 0.0;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<CategoricalSample> train_x;
    std::vector<int> train_y;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (fold[i] == f) {
        test.push_back(i);
      } else {
        train_x.push_back(samples[i]);
        train_y.push_back(labels[i]);
      }
    }
    const Forest forest = Forest::train(train_x, categories, train_y, config, rng);
    std::size_t correct = 0;
    for (std::size_t i : test) correct += forest.predict(samples[i]) == labels[i] ? 1 : 0;
    total += static_cast<double>(correct) / static_cast<double>(test.size());
  }
  return total / static_cast<double>(k);
}

CategoricalSample encode_grid(const TileGrid& grid, std::string_view vocabulary) {
  std::array<std::uint8_t, 256> index;
  index.fill(kUnknownCategory);
  for (std::size_t i = 0; i < vocabulary.size(); ++i) index[static_cast<unsigned char>(vocabulary[i])] = std::uint8_t(i);
  CategoricalSample out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = index[static_cast<unsigned char>(grid.tiles()[i])];
  return out;
}

SegmentClassifier::SegmentClassifier(std::string vocabulary, std::size_t rows, std::size_t cols, Forest forest)
    : vocabulary_(std::move(vocabulary)), rows_(rows), cols_(cols), forest_(std::move(forest)) {
  if (forest_.cells() != rows_ * cols_ || forest_.categories() != vocabulary_.size()) {
    throw ShapeError("forest does not match the classifier's segment shape and vocabulary");
  }
  build_index();
}

void SegmentClassifier::build_index() {
  index_.fill(kUnknownCategory);
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    index_[static_cast<unsigned char>(vocabulary_[i])] = static_cast<std::uint8_t>(i);
  }
}

CategoricalSample SegmentClassifier::encode(const TileGrid& grid) const {
  if (grid.rows() != rows_ || grid.cols() != cols_) {
    throw ShapeError("classifier expects " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                     " segments, got " + std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()));
  }
  CategoricalSample out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = index_[static_cast<unsigned char>(grid.tiles()[i])];
  return out;
}

int SegmentClassifier::predict(const TileGrid& grid) const { return forest_.predict(encode(grid)); }

DirectionalLabel SegmentClassifier::predict_directional(const TileGrid& grid) const {
  return DirectionalLabel::from_index(static_cast<unsigned>(predict(grid)));
}

void SegmentClassifier::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "segblend-classifier 1\n" << rows_ << ' ' << cols_ << '\n' << vocabulary_ << '\n' << forest_.to_text();
  if (!out) throw IoError("failed writing " + path.string());
}

SegmentClassifier SegmentClassifier::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string magic, dims, vocabulary;
  std::getline(in, magic);
  std::getline(in, dims);
  std::getline(in, vocabulary);
  if (magic != "segblend-classifier 1") throw FormatError(path.string() + " is not a classifier file");
  std::istringstream d(dims);
  std::size_t rows = 0, cols = 0;
  if (!(d >> rows >> cols)) throw FormatError(path.string() + ": bad classifier shape line");
  std::ostringstream rest;
  rest << in.rdbuf();
  return SegmentClassifier(vocabulary, rows, cols, Forest::from_text(rest.str()));
}

SegmentClassifier train_directional_classifier(const Corpus& corpus, const ForestConfig& config, Rng& rng) {
  if (corpus.empty()) throw PreconditionError("cannot train a classifier on an empty corpus");
  std::vector<CategoricalSample> x;
  std::vector<int> y;
  for (const auto& seg : corpus.segments) {
    x.push_back(encode_grid(seg.grid, corpus.vocabulary));
    y.push_back(static_cast<int>(seg.label.index()));
  }
  Forest forest = Forest::train(x, corpus.vocabulary.size(), y, config, rng);
  return SegmentClassifier(corpus.vocabulary, corpus.segment_rows(), corpus.segment_cols(), std::move(forest));
}

SegmentClassifier train_game_classifier(std::span<const Corpus> corpora, const ForestConfig& config, Rng& rng) {
  if (corpora.size() < 2) throw PreconditionError("a game classifier needs at least two corpora");
  std::vector<AnnotatedSegment> all;
  for (const auto& c : corpora) {
    if (c.empty()) throw PreconditionError("cannot train a game classifier with an empty corpus");
    if (c.segment_rows() != corpora[0].segment_rows() || c.segment_cols() != corpora[0].segment_cols()) {
      throw ShapeError("game classifier corpora differ in segment shape");
    }
    all.insert(all.end(), c.segments.begin(), c.segments.end());
  }
  const std::string vocabulary = vocabulary_of(all);
  std::vector<CategoricalSample> x;
  std::vector<int> y;
  for (std::size_t g = 0; g < corpora.size(); ++g) {
    for (const auto& seg : corpora[g].segments) {
      x.push_back(encode_grid(seg.grid, vocabulary));
      y.push_back(static_cast<int>(g));
    }
  }
  Forest forest = Forest::train(x, vocabulary.size(), y, config, rng);
  return SegmentClassifier(vocabulary, corpora[0].segment_rows(), corpora[0].segment_cols(), std::move(forest));
}

std::string_view to_string(MatchKind kind) {
  switch (kind) {
    case MatchKind::Exact: return "exact";
    case MatchKind::Admissible: return "admissible";
    case MatchKind::None: return "none";
  }
  return "none";
}

MatchKind match(DirectionalLabel predicted, DirectionalLabel conditioned) {
  if (predicted == conditioned) return MatchKind::Exact;
  if ((predicted.index() & conditioned.index()) == conditioned.index()) return MatchKind::Admissible;
  return MatchKind::None;
}

LabelSplit in_out_split(const Corpus& corpus) {
  const auto present = unique_label_indices(corpus);
  LabelSplit split;
  for (const auto& label : all_directional_labels()) {
    (present.count(label.index()) ? split.in : split.out).push_back(label);
  }
  return split;
}

}  // namespace segblend

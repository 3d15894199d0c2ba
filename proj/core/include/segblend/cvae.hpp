#pragma once

#include "segblend/adam.hpp"
#include "segblend/corpus.hpp"
#include "segblend/dense.hpp"
#include "segblend/losses.hpp"
#include "segblend/seeding.hpp"
#include "segblend/tiles.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segblend {

// Directional bits optionally followed by one bit per blended game.
struct ConditionLabel {
  DirectionalLabel directional;
  std::vector<std::uint8_t> game_bits;

  std::size_t width() const { return 4 + game_bits.size(); }
  std::vector<std::uint8_t> bits() const;
  std::string to_string() const;

  // "1,0,0,1" or "1 0 0 1 1 0"; at least four 0/1 bits.
  static ConditionLabel parse(std::string_view text);

  bool operator==(const ConditionLabel&) const = default;
};

// All 2^n game-bit vectors in binary counting order (first bit most significant).
std::vector<std::vector<std::uint8_t>> all_game_bit_combinations(std::size_t n);

std::string bits_to_string(std::span<const std::uint8_t> bits);

struct CvaeArchitecture {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string vocabulary;
  std::size_t latent_dim = 8;
  std::size_t label_width = 4;
  // Game order defines the game bits: games[i] <-> game_bits[i].
  std::vector<GameId> games;
  std::vector<std::size_t> hidden = {512, 256, 128};

  std::size_t cells() const { return rows * cols; }
  std::size_t tile_units() const { return cells() * vocabulary.size(); }
  std::size_t encoder_input() const { return tile_units() + label_width; }
  std::size_t decoder_input() const { return latent_dim + label_width; }

  // {in, hidden..., 2*latent}
  std::vector<std::size_t> encoder_widths() const;
  // {latent + label, reversed hidden..., tile units}
  std::vector<std::size_t> decoder_widths() const;

  bool operator==(const CvaeArchitecture&) const = default;
};

// Per-cell distributions: column c holds cell c's probabilities over the
// vocabulary (cells in row-major order).
using TileDistribution = Matrix;

// Weights are held and trained in single precision; the public interface
// speaks double.
class CvaeModel {
 public:
  using Net = BasicDenseNet<float>;

  static CvaeModel initialize(CvaeArchitecture arch, std::uint64_t seed);
  CvaeModel(CvaeArchitecture arch, Net encoder, Net decoder, std::uint64_t seed);

  const CvaeArchitecture& architecture() const { return arch_; }
  const Net& encoder() const { return encoder_; }
  const Net& decoder() const { return decoder_; }
  Net& encoder() { return encoder_; }
  Net& decoder() { return decoder_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t latent_dim() const { return arch_.latent_dim; }
  std::size_t label_width() const { return arch_.label_width; }

  // Tile indices per cell; unknown tiles throw VocabularyError.
  std::vector<std::uint32_t> tile_indices(const TileGrid& grid) const;
  // Active input units (one-hot tiles then set label bits).
  std::vector<std::uint32_t> encoder_active(const TileGrid& grid, const ConditionLabel& label) const;

  GaussianParams encode(const TileGrid& grid, const ConditionLabel& label) const;
  TileDistribution decode(const Vector& z, const ConditionLabel& label) const;

  // Raw decoder logits for a batch: z is latent x B, labels is width x B.
  Matrix decode_logits(const Matrix& z, const Matrix& labels) const;
  // Per-cell argmax, ties to the lowest vocabulary index.
  TileGrid argmax_grid(const Eigen::Ref<const Vector>& logits_or_probs) const;
  std::vector<TileGrid> decode_argmax(const Matrix& z, const Matrix& labels) const;

  // z ~ N(0, I) drawn from rng, then argmax decode.
  AnnotatedSegment generate(const ConditionLabel& label, Rng& rng) const;
  AnnotatedSegment generate_from_latent(const Vector& z, const ConditionLabel& label) const;
  Vector sample_latent(Rng& rng) const;

  // Decode of the posterior mean.
  TileGrid reconstruct(const TileGrid& grid, const ConditionLabel& label) const;

  // Game attributed to generated segments: the first game whose bit is set,
  // else the first game of the model.
  GameId game_for(const ConditionLabel& label) const;

  void save(const std::filesystem::path& path) const;
  static CvaeModel load(const std::filesystem::path& path);

  bool operator==(const CvaeModel& other) const;

 private:
  void check_label(const ConditionLabel& label) const;

  CvaeArchitecture arch_;
  Net encoder_;
  Net decoder_;
  std::uint64_t seed_ = 0;
  std::array<int, 256> tile_index_{};
};

Vector label_vector(const ConditionLabel& label);

// Loss and gradients of one minibatch. The objective is
// (sum of per-cell cross-entropies + kl_weight * KL) / B with
// z = mu + exp(logvar / 2) * eps; eps is latent x B.
template <typename T>
struct BatchStep {
  double reconstruction = 0.0;  // summed over the batch
  double kl = 0.0;              // summed over the batch
  BasicDenseGrads<T> encoder;
  BasicDenseGrads<T> decoder;
};

template <typename T>
BatchStep<T> cvae_batch_step(const BasicDenseNet<T>& encoder, const BasicDenseNet<T>& decoder,
                             const BinaryBatch& x, const MatrixT<T>& labels,
                             std::span<const std::vector<std::uint32_t>* const> targets,
                             std::size_t vocab, const MatrixT<T>& eps, double kl_weight);

struct TrainConfig {
  std::size_t epochs = 10000;
  std::size_t latent_dim = 8;
  LearningRateSchedule schedule;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden = {512, 256, 128};
  double kl_weight = 1.0;
  // Invoked after every epoch.
  std::function<void(std::size_t epoch, double reconstruction, double kl)> on_epoch;
};

struct EpochStats {
  std::size_t epoch = 0;
  double reconstruction = 0.0;  // mean per-segment summed cross-entropy
  double kl = 0.0;              // mean per-segment KL
  double learning_rate = 0.0;
};

struct TrainResult {
  CvaeModel model;
  std::vector<EpochStats> history;
};

struct TrainingSet {
  std::vector<TileGrid> grids;
  std::vector<ConditionLabel> labels;
};

TrainResult train_model(const CvaeArchitecture& arch, const TrainingSet& data, const TrainConfig& config);

// Single-game model with 4-bit directional labels.
TrainResult train(const Corpus& corpus, const TrainConfig& config);

// One model over several single-game corpora; corpus i gets game bit i.
TrainResult blend_train(std::span<const Corpus> corpora, const TrainConfig& config);

// Tab-separated: epoch, reconstruction, kl, lr.
void write_training_log(std::ostream& out, std::span<const EpochStats> history);

}  // namespace segblend

#pragma once

#include "segblend/classifier.hpp"
#include "segblend/corpus.hpp"
#include "segblend/cvae.hpp"
#include "segblend/game_config.hpp"
#include "segblend/metrics.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace segblend {

using DirectionalPredictor = std::function<DirectionalLabel(const TileGrid&)>;

// Zelda needs no classifier: labels come from door tiles.
DirectionalPredictor zelda_door_rule(const GameSpec& zelda);
DirectionalPredictor forest_predictor(const SegmentClassifier& classifier);

// result[i][j] is latent j decoded under labels[i]. The same n_latents
// standard-normal latents are shared by every label.
std::vector<std::vector<TileGrid>> generate_grid(const CvaeModel& model, std::span<const ConditionLabel> labels,
                                                 std::size_t n_latents, Rng& rng);

// Percentages in [0, 100]. OUT fields stay 0 when the split has no OUT labels.
struct DirectionalRow {
  std::size_t latent = 0;
  double exact_in = 0.0;
  double admissible_in = 0.0;
  double exact_out = 0.0;
  double admissible_out = 0.0;
  double exact = 0.0;  // over all 16 labels
  double admissible = 0.0;
  std::size_t in_labels = 0;
  std::size_t out_labels = 0;
};

DirectionalRow directional_accuracy(const CvaeModel& model, const DirectionalPredictor& predict,
                                    const LabelSplit& split, std::size_t n_latents, Rng& rng);

struct BlendRow {
  std::vector<std::uint8_t> game_bits;
  // percent[i]: share of segments predicted as the model's game i.
  std::vector<double> percent;
  std::size_t samples = 0;
};

// Every game-bit combination crossed with all 16 directional labels.
// Game classifier class i must be the model's game i.
std::vector<BlendRow> blend_accuracy(const CvaeModel& model, const SegmentClassifier& game_classifier,
                                     std::size_t n_latents, Rng& rng);

struct MetricSummary {
  MeanStd density;
  MeanStd symmetry;
  double density_p = 1.0;
  double symmetry_p = 1.0;
  bool density_significant = false;  // p < 0.05
  bool symmetry_significant = false;
};

struct DensitySymmetryResult {
  MeanStd original_density;
  MeanStd original_symmetry;
  MetricSummary generated;
};

// As many latents as training segments; each latent contributes the mean
// metric over its IN-label generations. Rank-sum against the training values.
DensitySymmetryResult density_symmetry_study(const CvaeModel& model, const Corpus& corpus,
                                             std::string_view solid_set, Rng& rng);

struct NoveltyRow {
  double in = 0.0;  // percent
  double out = 0.0;
  double overall = 0.0;
};

NoveltyRow novelty_study(const CvaeModel& model, const Corpus& corpus, std::size_t n_latents, Rng& rng);

struct EdistanceEntry {
  std::vector<std::uint8_t> game_bits;
  GameId game = GameId::Zelda;  // original corpus compared against
  double value = 0.0;
};

// corpora[i] belongs to the model's game i and has the model's segment shape.
// Points use the blend solid set so every corpus shares one metric space.
std::vector<EdistanceEntry> edistance_study(const CvaeModel& model, std::span<const Corpus> corpora,
                                            std::string_view solid_set, std::size_t n_latents, Rng& rng);

// ---- full protocol ----------------------------------------------------------

enum class EvalMode { Desk, Full };

EvalMode parse_eval_mode(std::string_view name);
std::string_view to_string(EvalMode mode);

struct EvaluationPlan {
  EvalMode mode = EvalMode::Desk;
  // Training corpora by game; Zelda rooms unpadded (11x16).
  std::map<GameId, Corpus> corpora;
  std::vector<std::size_t> latents;  // empty: {8} in desk mode, {4, 8, 16, 32} in full mode
  // Each entry is a blend in game-bit order. Empty: every default blend whose
  // games are present.
  std::vector<std::vector<GameId>> blends;
  std::uint64_t seed = 0;
  // Overrides of the mode defaults; 0 keeps the default.
  std::size_t epochs = 0;
  std::size_t n_latents = 0;
  std::size_t blend_latents = 0;
  std::size_t cv_folds = 10;
  ForestConfig forest;
  // Trained checkpoints are written here and reused when present.
  std::optional<std::filesystem::path> checkpoint_dir;
  std::function<void(const std::string&)> progress;

  std::size_t effective_epochs() const;
  std::size_t effective_latents() const;
  std::size_t effective_blend_latents() const;
  std::vector<std::size_t> effective_latent_sizes() const;
};

// Zelda-Metroid, Zelda-Mega Man, Metroid-Mega Man, Zelda-Lode Runner and
// Zelda-Metroid-Mega Man.
std::vector<std::vector<GameId>> default_blends();

struct GameResults {
  GameId game = GameId::Zelda;
  std::size_t segments = 0;
  std::size_t in_labels = 0;
  std::optional<double> cv_accuracy;  // not for Zelda
  std::map<std::size_t, DirectionalRow> directional;
  MeanStd original_density;
  MeanStd original_symmetry;
  std::map<std::size_t, MetricSummary> density_symmetry;
  std::map<std::size_t, NoveltyRow> novelty;
};

struct BlendResults {
  std::vector<GameId> games;
  std::map<std::size_t, std::vector<BlendRow>> rows;
  std::map<std::size_t, std::vector<EdistanceEntry>> edistance;
};

struct EvalReport {
  EvalMode mode = EvalMode::Desk;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::size_t n_latents = 0;
  std::size_t blend_latents = 0;
  std::vector<GameResults> games;
  std::vector<BlendResults> blends;
};

std::string blend_name(std::span<const GameId> games);

// Pads Zelda rooms when a blend includes a 15x16 game.
Corpus blend_ready(const Corpus& corpus, std::span<const GameId> blend);

// Trains (or loads) every model in the plan and runs all studies.
EvalReport run_evaluation(const EvaluationPlan& plan, const GameConfig& config);

// table1_directional.tsv, table2_blends.tsv, table3_blend3.tsv,
// table4_density_symmetry.tsv, table5_novelty.tsv, edistance.tsv,
// edistance.png and summary.md.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace segblend

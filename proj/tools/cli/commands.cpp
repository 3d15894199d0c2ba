#include "commands.hpp"

#include <segblend/assembler.hpp>
#include <segblend/classifier.hpp>
#include <segblend/corpus.hpp>
#include <segblend/cvae.hpp>
#include <segblend/errors.hpp>
#include <segblend/evaluation.hpp>
#include <segblend/game_config.hpp>
#include <segblend/layout.hpp>
#include <segblend/render.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace segblend::cli {

namespace {

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const FormatError*>(&e)) return "format";
  if (dynamic_cast<const VocabularyError*>(&e)) return "vocabulary";
  if (dynamic_cast<const ExtractionError*>(&e)) return "extraction";
  if (dynamic_cast<const AnnotationError*>(&e)) return "annotation";
  if (dynamic_cast<const ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
  if (dynamic_cast<const TrainingError*>(&e)) return "training";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal";
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

GameConfig load_games(const std::string& path) {
  return path.empty() ? GameConfig::load_default() : GameConfig::load(path);
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("'" + text + "' is not a comma-separated list of numbers");
    }
  }
  return out;
}

std::vector<GameId> parse_game_list(const std::string& text) {
  std::vector<GameId> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(parse_game(item));
  return out;
}

struct Options {
  std::uint64_t seed = 0;
  std::string games_path;

  // ingest
  std::vector<std::string> inputs;
  std::string game;
  bool no_flips = false;
  bool pad = false;
  std::size_t min_run = 2;
  std::string annotations;

  // train
  std::vector<std::string> corpora;
  std::size_t latent = 8;
  std::size_t epochs = 10000;
  std::size_t batch = 64;
  double lr = 1e-3;
  double decay_factor = 0.01;
  std::size_t decay_interval = 2500;
  std::string decay_mode = "factor";
  std::string log_path;
  bool quiet = false;

  // generate / assemble
  std::vector<std::string> models;
  std::string label;
  std::size_t count = 1;
  std::size_t steps_min = 6;
  std::size_t steps_max = 12;
  std::string probs;
  std::string game_probs;
  std::string layout_path;

  // evaluate
  std::string mode = "desk";
  std::vector<std::size_t> latents;
  std::size_t n_latents = 0;
  std::size_t blend_latents = 0;
  std::vector<std::string> blends;
  std::size_t folds = 10;
  std::size_t trees = 100;
  std::string checkpoints;

  // render
  std::string level_path;
  std::string tileset;

  std::string out;
};

int cmd_ingest(const Options& o, std::ostream& out) {
  const GameConfig config = load_games(o.games_path);
  const GameSpec& spec = config.game(parse_game(o.game));
  IngestOptions options;
  options.augment_flips = !o.no_flips;
  options.pad_to_blend_height = o.pad;
  options.min_run = o.min_run;
  if (!o.annotations.empty()) options.annotations = o.annotations;
  std::vector<std::filesystem::path> inputs(o.inputs.begin(), o.inputs.end());
  const Corpus corpus = ingest_levels(inputs, spec, options);
  save_corpus(corpus, o.out);
  out << corpus.size() << " segments, " << unique_label_indices(corpus).size() << " direction classes, "
      << corpus.segment_rows() << "x" << corpus.segment_cols() << " -> " << o.out << '\n';
  return kOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  std::vector<Corpus> corpora;
  for (const auto& path : o.corpora) corpora.push_back(load_corpus(path));
  TrainConfig config;
  config.epochs = o.epochs;
  config.latent_dim = o.latent;
  config.batch_size = o.batch;
  config.seed = o.seed;
  config.schedule.base = o.lr;
  config.schedule.factor = o.decay_factor;
  config.schedule.interval = o.decay_interval;
  config.schedule.mode = parse_decay_mode(o.decay_mode);
  if (!o.quiet) {
    const std::size_t every = std::max<std::size_t>(1, o.epochs / 20);
    config.on_epoch = [&out, every, total = o.epochs](std::size_t epoch, double recon, double kl) {
      if ((epoch + 1) % every == 0 || epoch + 1 == total) {
        out << "epoch " << epoch + 1 << "/" << total << " reconstruction " << recon << " kl " << kl << '\n';
      }
    };
  }
  TrainResult result = [&] {
    if (corpora.size() == 1) return train(corpora[0], config);
    std::vector<GameId> games;
    for (const auto& c : corpora) {
      if (c.games.size() != 1) throw PreconditionError("blend corpora must each hold one game");
      games.push_back(c.games[0]);
    }
    if (o.pad) {
      for (auto& c : corpora) c = blend_ready(c, games);
    }
    return blend_train(corpora, config);
  }();
  result.model.save(o.out);
  const std::string log = o.log_path.empty() ? o.out + ".log.tsv" : o.log_path;
  std::ostringstream text;
  write_training_log(text, result.history);
  write_text(log, text.str());
  out << "saved " << o.out << " (latent " << result.model.latent_dim() << ", label width "
      << result.model.label_width() << ", vocabulary " << result.model.architecture().vocabulary.size()
      << " tiles)\n";
  return kOk;
}

int cmd_generate(const Options& o, std::ostream& out) {
  const CvaeModel model = CvaeModel::load(o.models.at(0));
  const ConditionLabel label = ConditionLabel::parse(o.label);
  if (label.width() != model.label_width()) {
    throw ShapeError("label " + label.to_string() + " has " + std::to_string(label.width()) +
                     " bits, the model expects " + std::to_string(model.label_width()));
  }
  Rng rng = make_rng(o.seed, "generate");
  std::ostringstream text;
  for (std::size_t i = 0; i < o.count; ++i) {
    const AnnotatedSegment seg = model.generate(label, rng);
    text << "segment " << i << " label " << label.to_string() << " game " << to_string(seg.game) << '\n'
         << seg.grid.to_text() << "\n\n";
  }
  if (o.out.empty()) {
    out << text.str();
  } else {
    write_text(o.out, text.str());
    out << "wrote " << o.count << " segments to " << o.out << '\n';
  }
  return kOk;
}

Layout layout_for(const Options& o) {
  if (!o.layout_path.empty()) return parse_layout(read_text(o.layout_path));
  Rng rng = make_rng(o.seed, "layout");
  return generate_layout(o.steps_min, o.steps_max, rng);
}

int cmd_layout(const Options& o, std::ostream& out) {
  const Layout layout = layout_for(o);
  const std::string text = format_layout(layout);
  if (o.out.empty()) {
    out << text;
  } else {
    write_text(o.out, text);
    out << layout.size() << " cells after " << layout.step_count << " steps -> " << o.out << '\n';
  }
  return kOk;
}

int cmd_assemble(const Options& o, std::ostream& out) {
  std::vector<CvaeModel> models;
  for (const auto& path : o.models) models.push_back(CvaeModel::load(path));
  const Layout layout = layout_for(o);
  Rng rng = make_rng(o.seed, "assemble");
  Level level;
  if (models.size() == 1 && o.probs.empty()) {
    const CvaeModel& m = models[0];
    GameBitPolicy policy;
    const std::size_t n_games = m.label_width() - 4;
    if (!o.game_probs.empty()) {
      policy.probabilities = parse_numbers(o.game_probs);
    } else if (n_games > 0) {
      policy = GameBitPolicy::uniform(n_games);
    }
    level = assemble(layout, m, policy, rng);
  } else {
    std::vector<double> probs = o.probs.empty() ? std::vector<double>(models.size(), 1.0 / double(models.size()))
                                                : parse_numbers(o.probs);
    std::vector<const CvaeModel*> ptrs;
    for (const auto& m : models) ptrs.push_back(&m);
    level = assemble_multi(layout, ptrs, probs, rng);
  }
  write_text(o.out, format_level(level));
  out << "assembled " << level.placements.size() << " segments -> " << o.out << '\n';
  return kOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const GameConfig config = load_games(o.games_path);
  EvaluationPlan plan;
  plan.mode = parse_eval_mode(o.mode);
  plan.seed = o.seed;
  plan.latents = o.latents;
  plan.epochs = o.epochs;
  plan.n_latents = o.n_latents;
  plan.blend_latents = o.blend_latents;
  plan.cv_folds = o.folds;
  plan.forest.n_trees = o.trees;
  for (const auto& b : o.blends) plan.blends.push_back(parse_game_list(b));
  if (!o.checkpoints.empty()) plan.checkpoint_dir = o.checkpoints;
  if (!o.quiet) plan.progress = [&out](const std::string& msg) { out << msg << '\n' << std::flush; };
  for (const auto& path : o.corpora) {
    Corpus c = load_corpus(path);
    if (c.games.size() != 1) throw PreconditionError(path + " holds more than one game");
    const GameId g = c.games[0];
    if (!plan.corpora.emplace(g, std::move(c)).second) {
      throw PreconditionError("two corpora for " + std::string(to_string(g)));
    }
  }
  const EvalReport report = run_evaluation(plan, config);
  write_report(report, o.out);
  out << "report written to " << o.out << '\n';
  return kOk;
}

int cmd_render(const Options& o, std::ostream& out) {
  const Level level = parse_level_file(read_text(o.level_path));
  const std::filesystem::path target(o.out);
  if (target.extension() == ".png") {
    const Tileset tileset = o.tileset.empty() ? Tileset::load_default() : Tileset::load(o.tileset);
    const Image image = render_image(level, tileset);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    write_png(image, target);
    out << image.width() << "x" << image.height() << " image -> " << o.out << '\n';
  } else {
    write_text(target, render_text(level));
    out << "text rendering -> " << o.out << '\n';
  }
  return kOk;
}

// "--config PATH" or "--config=PATH" anywhere on the command line, else
// $SEGBLEND_CONFIG.
std::string find_config_path(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.starts_with("--config=")) return std::string(arg.substr(9));
  }
  const char* env = std::getenv("SEGBLEND_CONFIG");
  return env != nullptr ? env : "";
}

// Config values become option defaults, so the environment and the command
// line both override them: file < environment < flags.
void apply_config_defaults(CLI::App& app, const std::string& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    CLI::App* target = &app;
    for (const std::string& parent : item.parents) {
      target = target->get_subcommand_no_throw(parent);
      if (target == nullptr) throw ConfigError("config file " + path + ": unknown section [" + parent + "]");
    }
    CLI::Option* opt = target->get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw ConfigError("config file " + path + ": unknown key '" + item.fullname() + "'");
    opt->required(false)->run_callback_for_default();
    try {
      if (item.inputs.size() == 1) {
        opt->default_val(item.inputs.front());
      } else {
        opt->default_val(item.inputs);
      }
    } catch (const CLI::Error& e) {
      throw ConfigError("config file " + path + ": bad value for '" + item.fullname() + "': " + e.what());
    }
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional level-segment generation and game blending"};
  app.name("segblend");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  std::string config_path;
  app.add_option("--config", config_path, "TOML/INI file with option defaults")->envname("SEGBLEND_CONFIG");
  app.add_option("--seed", o.seed, "Root seed for every random stream")->envname("SEGBLEND_SEED");
  app.add_option("--games", o.games_path, "Games config (default: shipped games.json)")->envname("SEGBLEND_GAMES");

  auto* ingest = app.add_subcommand("ingest", "Parse levels into an annotated corpus file");
  ingest->add_option("inputs", o.inputs, "Level files or directories of *.txt")->required();
  ingest->add_option("--game", o.game, "zelda, metroid, megaman or loderunner")->required()->envname("SEGBLEND_GAME");
  ingest->add_flag("--no-flips", o.no_flips, "Skip the Zelda flip augmentation");
  ingest->add_flag("--pad", o.pad, "Pad Zelda rooms to 15x16");
  ingest->add_option("--min-run", o.min_run, "Opening run length for platformer labels");
  ingest->add_option("--annotations", o.annotations, "Label sidecar: <provenance> U D L R");
  ingest->add_option("--out", o.out, "Corpus file")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a CVAE; several corpora make a blend model");
  train_cmd->add_option("--corpus", o.corpora, "Corpus file (repeat for a blend, in game-bit order)")->required();
  train_cmd->add_option("--latent", o.latent, "Latent size")->envname("SEGBLEND_LATENT");
  train_cmd->add_option("--epochs", o.epochs, "Training epochs")->envname("SEGBLEND_EPOCHS");
  train_cmd->add_option("--batch", o.batch, "Batch size");
  train_cmd->add_option("--lr", o.lr, "Base learning rate");
  train_cmd->add_option("--decay-factor", o.decay_factor, "Learning-rate decay factor");
  train_cmd->add_option("--decay-interval", o.decay_interval, "Epochs between decays");
  train_cmd->add_option("--decay-mode", o.decay_mode, "factor or decrement");
  train_cmd->add_flag("--pad", o.pad, "Pad Zelda rooms when blending with 15x16 games");
  train_cmd->add_option("--log", o.log_path, "Training log (default: <out>.log.tsv)");
  train_cmd->add_flag("--quiet", o.quiet, "No progress output");
  train_cmd->add_option("--out", o.out, "Checkpoint file")->required();

  auto* generate = app.add_subcommand("generate", "Sample segments for one label");
  generate->add_option("--model", o.models, "Checkpoint")->required()->expected(1);
  generate->add_option("--label", o.label, "Directional bits then game bits, e.g. 1,0,0,1")->required();
  generate->add_option("--count", o.count, "Number of segments");
  generate->add_option("--out", o.out, "Output file (default: stdout)");

  auto* layout_cmd = app.add_subcommand("layout", "Generate a random layout");
  layout_cmd->add_option("--steps-min", o.steps_min, "Fewest steps")->envname("SEGBLEND_STEPS_MIN");
  layout_cmd->add_option("--steps-max", o.steps_max, "Most steps")->envname("SEGBLEND_STEPS_MAX");
  layout_cmd->add_option("--out", o.out, "Layout file (default: stdout)");

  auto* assemble_cmd = app.add_subcommand("assemble", "Fill a layout with generated segments");
  assemble_cmd->add_option("--model", o.models, "Checkpoint (repeat for turn-taking)")->required();
  assemble_cmd->add_option("--probs", o.probs, "Per-model probabilities, e.g. 0.5,0.5")->envname("SEGBLEND_PROBS");
  assemble_cmd->add_option("--game-probs", o.game_probs, "Per-game bit probabilities for a blend model");
  assemble_cmd->add_option("--layout", o.layout_path, "Layout file (default: generate one)");
  assemble_cmd->add_option("--steps-min", o.steps_min, "Fewest layout steps")->envname("SEGBLEND_STEPS_MIN");
  assemble_cmd->add_option("--steps-max", o.steps_max, "Most layout steps")->envname("SEGBLEND_STEPS_MAX");
  assemble_cmd->add_option("--out", o.out, "Level file")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Train and evaluate models, write the report tables");
  evaluate->add_option("--corpus", o.corpora, "Corpus file, one per game")->required();
  evaluate->add_option("--mode", o.mode, "desk or full")->envname("SEGBLEND_MODE");
  evaluate->add_option("--latent", o.latents, "Latent sizes (repeatable)");
  evaluate->add_option("--epochs", o.epochs, "Override the mode's epoch count")->default_val(0);
  evaluate->add_option("--latents", o.n_latents, "Latents per label")->default_val(0);
  evaluate->add_option("--blend-latents", o.blend_latents, "Latents per blend label")->default_val(0);
  evaluate->add_option("--blend", o.blends, "Blend as a game list, e.g. zelda,loderunner (repeatable)");
  evaluate->add_option("--folds", o.folds, "Cross-validation folds");
  evaluate->add_option("--trees", o.trees, "Trees per forest");
  evaluate->add_option("--checkpoints", o.checkpoints, "Checkpoint cache directory");
  evaluate->add_flag("--quiet", o.quiet, "No progress output");
  evaluate->add_option("--out", o.out, "Report directory")->required();

  auto* render_cmd = app.add_subcommand("render", "Render a level as text or PNG");
  render_cmd->add_option("--level", o.level_path, "Level file")->required();
  render_cmd->add_option("--tileset", o.tileset, "Tileset JSON (default: shipped tileset.json)");
  render_cmd->add_option("--out", o.out, "Output: .png for an image, anything else for text")->required();

  try {
    if (const std::string path = find_config_path(argc, argv); !path.empty()) apply_config_defaults(app, path);
  } catch (const std::exception& e) {
    err << "segblend: error: kind=" << error_kind(e) << " message=" << one_line(e.what()) << '\n';
    return kFailure;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "segblend: error: kind=usage message=" << one_line(e.what()) << '\n';
    return kUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(o, out);
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (generate->parsed()) return cmd_generate(o, out);
    if (layout_cmd->parsed()) return cmd_layout(o, out);
    if (assemble_cmd->parsed()) return cmd_assemble(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (render_cmd->parsed()) return cmd_render(o, out);
  } catch (const std::exception& e) {
    err << "segblend: error: kind=" << error_kind(e) << " message=" << one_line(e.what()) << '\n';
    return kFailure;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"segblend"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace segblend::cli

#include "segblend/evaluation.hpp"

#include "segblend/errors.hpp"
#include "segblend/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace segblend {

DirectionalPredictor zelda_door_rule(const GameSpec& zelda) {
  return [zelda](const TileGrid& grid) { return derive_zelda_label(grid, zelda); };
}

DirectionalPredictor forest_predictor(const SegmentClassifier& classifier) {
  return [&classifier](const TileGrid& grid) { return classifier.predict_directional(grid); };
}

namespace {

Matrix sample_latents(std::size_t latent_dim, std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(static_cast<Eigen::Index>(latent_dim), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) = normal(rng);
  }
  return z;
}

std::vector<TileGrid> decode_batch(const CvaeModel& model, const Matrix& z, const ConditionLabel& label) {
  const Vector bits = label_vector(label);
  Matrix labels = bits.replicate(1, z.cols());
  return model.decode_argmax(z, labels);
}

std::vector<ConditionLabel> directional_conditions(std::span<const DirectionalLabel> labels,
                                                   const std::vector<std::uint8_t>& game_bits = {}) {
  std::vector<ConditionLabel> out;
  for (const auto& l : labels) out.push_back({l, game_bits});
  return out;
}

double percent(std::size_t hits, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

bool contains(std::span<const DirectionalLabel> labels, DirectionalLabel l) {
  return std::find(labels.begin(), labels.end(), l) != labels.end();
}

}  // namespace

std::vector<std::vector<TileGrid>> generate_grid(const CvaeModel& model, std::span<const ConditionLabel> labels,
                                                 std::size_t n_latents, Rng& rng) {
  const Matrix z = sample_latents(model.latent_dim(), n_latents, rng);
  std::vector<std::vector<TileGrid>> out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    if (label.width() != model.label_width()) throw ShapeError("label width does not match the model");
    out.push_back(n_latents == 0 ? std::vector<TileGrid>{} : decode_batch(model, z, label));
  }
  return out;
}

DirectionalRow directional_accuracy(const CvaeModel& model, const DirectionalPredictor& predict,
                                    const LabelSplit& split, std::size_t n_latents, Rng& rng) {
  const auto all = all_directional_labels();
  const auto grids = generate_grid(model, directional_conditions(all), n_latents, rng);
  std::size_t in_total = 0, in_exact = 0, in_adm = 0, out_total = 0, out_exact = 0, out_adm = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const bool in = contains(split.in, all[i]);
    for (const TileGrid& g : grids[i]) {
      const MatchKind kind = match(predict(g), all[i]);
      const std::size_t exact = kind == MatchKind::Exact ? 1 : 0;
      const std::size_t adm = kind != MatchKind::None ? 1 : 0;
      if (in) {
        ++in_total;
        in_exact += exact;
        in_adm += adm;
      } else {
        ++out_total;
        out_exact += exact;
        out_adm += adm;
      }
    }
  }
  DirectionalRow row;
  row.latent = model.latent_dim();
  row.exact_in = percent(in_exact, in_total);
  row.admissible_in = percent(in_adm, in_total);
  row.exact_out = percent(out_exact, out_total);
  row.admissible_out = percent(out_adm, out_total);
  row.exact = percent(in_exact + out_exact, in_total + out_total);
  row.admissible = percent(in_adm + out_adm, in_total + out_total);
  row.in_labels = split.in.size();
  row.out_labels = split.out.size();
  return row;
}

std::vector<BlendRow> blend_accuracy(const CvaeModel& model, const SegmentClassifier& game_classifier,
                                     std::size_t n_latents, Rng& rng) {
  const std::size_t n_games = model.architecture().games.size();
  if (model.label_width() != 4 + n_games || n_games < 2) throw ShapeError("blend_accuracy needs a blend model");
  const auto& classes = game_classifier.forest().classes();
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] != static_cast<int>(i) || classes.size() != n_games) {
      throw PreconditionError("game classifier classes do not match the blend's games");
    }
  }
  const Matrix z = sample_latents(model.latent_dim(), n_latents, rng);
  std::vector<BlendRow> rows;
  for (const auto& bits : all_game_bit_combinations(n_games)) {
    BlendRow row{bits, std::vector<double>(n_games, 0.0), 0};
    std::vector<std::size_t> counts(n_games, 0);
    for (const auto& d : all_directional_labels()) {
      for (const TileGrid& g : decode_batch(model, z, {d, bits})) {
        ++counts[static_cast<std::size_t>(game_classifier.predict(g))];
        ++row.samples;
      }
    }
    for (std::size_t i = 0; i < n_games; ++i) row.percent[i] = percent(counts[i], row.samples);
    rows.push_back(std::move(row));
  }
  return rows;
}

DensitySymmetryResult density_symmetry_study(const CvaeModel& model, const Corpus& corpus,
                                             std::string_view solid_set, Rng& rng) {
  if (corpus.empty()) throw PreconditionError("density/symmetry study needs a non-empty corpus");
  std::vector<double> train_d, train_s;
  for (const auto& seg : corpus.segments) {
    train_d.push_back(density(seg.grid, solid_set));
    train_s.push_back(symmetry(seg.grid));
  }
  const LabelSplit split = in_out_split(corpus);
  const auto grids = generate_grid(model, directional_conditions(split.in), corpus.size(), rng);
  std::vector<double> gen_d(corpus.size(), 0.0), gen_s(corpus.size(), 0.0);
  for (const auto& per_label : grids) {
    for (std::size_t j = 0; j < per_label.size(); ++j) {
      gen_d[j] += density(per_label[j], solid_set);
      gen_s[j] += symmetry(per_label[j]);
    }
  }
  for (std::size_t j = 0; j < gen_d.size(); ++j) {
    gen_d[j] /= static_cast<double>(split.in.size());
    gen_s[j] /= static_cast<double>(split.in.size());
  }
  DensitySymmetryResult r;
  r.original_density = mean_std(train_d);
  r.original_symmetry = mean_std(train_s);
  r.generated.density = mean_std(gen_d);
  r.generated.symmetry = mean_std(gen_s);
  r.generated.density_p = rank_sum_test(train_d, gen_d).p;
  r.generated.symmetry_p = rank_sum_test(train_s, gen_s).p;
  r.generated.density_significant = r.generated.density_p < 0.05;
  r.generated.symmetry_significant = r.generated.symmetry_p < 0.05;
  return r;
}

NoveltyRow novelty_study(const CvaeModel& model, const Corpus& corpus, std::size_t n_latents, Rng& rng) {
  const LabelSplit split = in_out_split(corpus);
  const auto all = all_directional_labels();
  const auto grids = generate_grid(model, directional_conditions(all), n_latents, rng);
  std::vector<TileGrid> training;
  for (const auto& seg : corpus.segments) training.push_back(seg.grid);
  std::vector<TileGrid> in, out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto& dest = contains(split.in, all[i]) ? in : out;
    dest.insert(dest.end(), grids[i].begin(), grids[i].end());
  }
  std::vector<TileGrid> both = in;
  both.insert(both.end(), out.begin(), out.end());
  return {100.0 * novelty(in, training), 100.0 * novelty(out, training), 100.0 * novelty(both, training)};
}

std::vector<EdistanceEntry> edistance_study(const CvaeModel& model, std::span<const Corpus> corpora,
                                            std::string_view solid_set, std::size_t n_latents, Rng& rng) {
  const auto& games = model.architecture().games;
  if (corpora.size() != games.size()) throw PreconditionError("need one original corpus per blended game");
  std::vector<std::vector<MetricPoint>> originals;
  for (const auto& c : corpora) {
    std::vector<MetricPoint> pts;
    for (const auto& seg : c.segments) pts.push_back(metric_point(seg.grid, solid_set));
    if (pts.empty()) throw PreconditionError("e-distance study needs non-empty corpora");
    originals.push_back(std::move(pts));
  }
  const auto all = all_directional_labels();
  const Matrix z = sample_latents(model.latent_dim(), n_latents, rng);
  std::vector<EdistanceEntry> out;
  for (const auto& bits : all_game_bit_combinations(games.size())) {
    std::vector<MetricPoint> generated;
    for (const auto& d : all) {
      for (const TileGrid& g : decode_batch(model, z, {d, bits})) generated.push_back(metric_point(g, solid_set));
    }
    for (std::size_t i = 0; i < games.size(); ++i) {
      out.push_back({bits, games[i], e_distance(originals[i], generated)});
    }
  }
  return out;
}

EvalMode parse_eval_mode(std::string_view name) {
  if (name == "desk") return EvalMode::Desk;
  if (name == "full") return EvalMode::Full;
  throw ConfigError("unknown evaluation mode '" + std::string(name) + "' (expected desk or full)");
}

std::string_view to_string(EvalMode mode) { return mode == EvalMode::Desk ? "desk" : "full"; }

std::size_t EvaluationPlan::effective_epochs() const {
  return epochs != 0 ? epochs : (mode == EvalMode::Desk ? 2000 : 10000);
}

std::size_t EvaluationPlan::effective_latents() const {
  return n_latents != 0 ? n_latents : (mode == EvalMode::Desk ? 200 : 1000);
}

std::size_t EvaluationPlan::effective_blend_latents() const { return blend_latents != 0 ? blend_latents : 100; }

std::vector<std::size_t> EvaluationPlan::effective_latent_sizes() const {
  if (!latents.empty()) return latents;
  return mode == EvalMode::Desk ? std::vector<std::size_t>{8} : std::vector<std::size_t>{4, 8, 16, 32};
}

std::vector<std::vector<GameId>> default_blends() {
  return {{GameId::Zelda, GameId::Metroid},
          {GameId::Zelda, GameId::MegaMan},
          {GameId::Metroid, GameId::MegaMan},
          {GameId::Zelda, GameId::LodeRunner},
          {GameId::Zelda, GameId::Metroid, GameId::MegaMan}};
}

std::string blend_name(std::span<const GameId> games) {
  std::string name;
  for (GameId g : games) {
    if (!name.empty()) name += '-';
    name += to_string(g);
  }
  return name;
}

Corpus blend_ready(const Corpus& corpus, std::span<const GameId> blend) {
  const bool tall = std::any_of(blend.begin(), blend.end(),
                                [](GameId g) { return g == GameId::Metroid || g == GameId::MegaMan; });
  if (!tall || corpus.games != std::vector<GameId>{GameId::Zelda} || corpus.segment_rows() != 11) return corpus;
  std::vector<AnnotatedSegment> padded = corpus.segments;
  for (auto& seg : padded) seg.grid = pad_zelda_room(seg.grid);
  return make_corpus(std::move(padded));
}

namespace {

// FNV-1a over the serialized corpora, so an edited corpus never reuses a
// cached checkpoint.
std::string corpus_fingerprint(std::span<const Corpus> corpora) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const Corpus& c : corpora) {
    for (unsigned char ch : format_corpus(c)) {
      h ^= ch;
      h *= 0x100000001B3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return std::string(hex, 8);
}

CvaeModel train_or_load(const EvaluationPlan& plan, const std::string& name, std::size_t latent,
                        std::span<const Corpus> corpora,
                        const std::function<TrainResult(const TrainConfig&)>& trainer) {
  TrainConfig config;
  config.epochs = plan.effective_epochs();
  config.latent_dim = latent;
  config.seed = derive_seed(plan.seed, "train/" + name + "/" + std::to_string(latent));
  std::optional<std::filesystem::path> path;
  if (plan.checkpoint_dir) {
    std::filesystem::create_directories(*plan.checkpoint_dir);
    path = *plan.checkpoint_dir / (name + "-l" + std::to_string(latent) + "-e" + std::to_string(config.epochs) +
                                   "-s" + std::to_string(plan.seed) + "-" + corpus_fingerprint(corpora) + ".ckpt");
    if (std::filesystem::exists(*path)) {
      if (plan.progress) plan.progress("loading " + path->string());
      return CvaeModel::load(*path);
    }
  }
  if (plan.progress) {
    plan.progress("training " + name + " latent " + std::to_string(latent) + " for " +
                  std::to_string(config.epochs) + " epochs");
  }
  CvaeModel model = trainer(config).model;
  if (path) model.save(*path);
  return model;
}

}  // namespace

EvalReport run_evaluation(const EvaluationPlan& plan, const GameConfig& config) {
  EvalReport report;
  report.mode = plan.mode;
  report.seed = plan.seed;
  report.epochs = plan.effective_epochs();
  report.n_latents = plan.effective_latents();
  report.blend_latents = plan.effective_blend_latents();
  const auto latent_sizes = plan.effective_latent_sizes();

  for (const auto& [game, corpus] : plan.corpora) {
    if (corpus.empty()) continue;
    const std::string name(to_string(game));
    const GameSpec& spec = config.game(game);
    GameResults gr;
    gr.game = game;
    gr.segments = corpus.size();
    const LabelSplit split = in_out_split(corpus);
    gr.in_labels = split.in.size();
    std::optional<SegmentClassifier> classifier;
    DirectionalPredictor predict;
    if (game == GameId::Zelda) {
      predict = zelda_door_rule(spec);
    } else if (split.in.size() >= 2) {
      Rng forest_rng = make_rng(plan.seed, "forest/" + name);
      classifier = train_directional_classifier(corpus, plan.forest, forest_rng);
      predict = forest_predictor(*classifier);
      std::vector<CategoricalSample> x;
      std::vector<int> y;
      for (const auto& seg : corpus.segments) {
        x.push_back(encode_grid(seg.grid, corpus.vocabulary));
        y.push_back(static_cast<int>(seg.label.index()));
      }
      const std::size_t k = std::min(plan.cv_folds, corpus.size());
      if (k >= 2) {
        Rng cv_rng = make_rng(plan.seed, "cv/" + name);
        gr.cv_accuracy = cross_validate(x, corpus.vocabulary.size(), y, k, plan.forest, cv_rng);
      }
    }
    for (std::size_t latent : latent_sizes) {
      const CvaeModel model = train_or_load(plan, name, latent, std::span(&corpus, 1),
                                              [&](const TrainConfig& c) { return train(corpus, c); });
      const std::string tag = name + "/" + std::to_string(latent);
      if (predict) {
        Rng rng = make_rng(plan.seed, "eval/directional/" + tag);
        gr.directional[latent] = directional_accuracy(model, predict, split, report.n_latents, rng);
      }
      Rng ds_rng = make_rng(plan.seed, "eval/density/" + tag);
      const auto ds = density_symmetry_study(model, corpus, spec.solid, ds_rng);
      gr.original_density = ds.original_density;
      gr.original_symmetry = ds.original_symmetry;
      gr.density_symmetry[latent] = ds.generated;
      Rng nov_rng = make_rng(plan.seed, "eval/novelty/" + tag);
      gr.novelty[latent] = novelty_study(model, corpus, report.n_latents, nov_rng);
    }
    report.games.push_back(std::move(gr));
  }

  const auto blends = plan.blends.empty() ? default_blends() : plan.blends;
  for (const auto& games : blends) {
    std::vector<Corpus> corpora;
    for (GameId g : games) {
      const auto it = plan.corpora.find(g);
      if (it == plan.corpora.end() || it->second.empty()) break;
      corpora.push_back(blend_ready(it->second, games));
    }
    if (corpora.size() != games.size()) continue;
    const std::string name = blend_name(games);
    BlendResults br;
    br.games = games;
    Rng forest_rng = make_rng(plan.seed, "forest/" + name);
    const SegmentClassifier game_classifier = train_game_classifier(corpora, plan.forest, forest_rng);
    const std::string solid = blend_solid_set(config, games);
    for (std::size_t latent : latent_sizes) {
      const CvaeModel model =
          train_or_load(plan, name, latent, corpora, [&](const TrainConfig& c) { return blend_train(corpora, c); });
      const std::string tag = name + "/" + std::to_string(latent);
      Rng rng = make_rng(plan.seed, "eval/blend/" + tag);
      br.rows[latent] = blend_accuracy(model, game_classifier, report.blend_latents, rng);
      Rng ed_rng = make_rng(plan.seed, "eval/edistance/" + tag);
      br.edistance[latent] = edistance_study(model, corpora, solid, report.blend_latents, ed_rng);
    }
    report.blends.push_back(std::move(br));
  }
  return report;
}

namespace {

std::ofstream open_report(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::fixed << std::setprecision(4);
  return out;
}

std::string fmt(double v, int precision = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

const std::array<Rgb, 4> kSeriesColors = {Rgb{220, 50, 47}, Rgb{38, 139, 210}, Rgb{133, 153, 0}, Rgb{211, 54, 130}};

Image plot_edistance(const EvalReport& report) {
  std::vector<std::pair<const BlendResults*, std::size_t>> panels;
  for (const auto& b : report.blends) {
    for (const auto& [latent, _] : b.edistance) panels.emplace_back(&b, latent);
  }
  const std::int64_t panel_w = 320, panel_h = 160, margin = 16;
  const std::size_t n = std::max<std::size_t>(1, panels.size());
  Image image(static_cast<std::size_t>(panel_w + 2 * margin),
              n * static_cast<std::size_t>(panel_h + margin) + static_cast<std::size_t>(margin), Rgb{255, 255, 255});
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& [blend, latent] = panels[p];
    const auto& entries = blend->edistance.at(latent);
    const std::int64_t ox = margin;
    const std::int64_t oy = margin + static_cast<std::int64_t>(p) * (panel_h + margin);
    image.draw_line(ox, oy + panel_h, ox + panel_w, oy + panel_h, Rgb{0, 0, 0});
    image.draw_line(ox, oy, ox, oy + panel_h, Rgb{0, 0, 0});
    double top = 1e-12;
    for (const auto& e : entries) top = std::max(top, e.value);
    const std::size_t n_games = blend->games.size();
    const std::size_t n_combos = entries.size() / n_games;
    for (std::size_t g = 0; g < n_games; ++g) {
      std::int64_t px = -1, py = -1;
      for (std::size_t c = 0; c < n_combos; ++c) {
        const double v = entries[c * n_games + g].value;
        const std::int64_t x = ox + 8 + static_cast<std::int64_t>(c) * (panel_w - 16) /
                                            static_cast<std::int64_t>(std::max<std::size_t>(1, n_combos - 1));
        const std::int64_t y = oy + panel_h - 4 - static_cast<std::int64_t>(v / top * double(panel_h - 12));
        const Rgb color = kSeriesColors[g % kSeriesColors.size()];
        image.fill_rect(x - 2, y - 2, 5, 5, color);
        if (px >= 0) image.draw_line(px, py, x, y, color);
        px = x;
        py = y;
      }
    }
  }
  return image;
}

}  // namespace

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    auto out = open_report(dir / "table1_directional.tsv");
    out << "game\tlatent\texact_in\tadmissible_in\texact_out\tadmissible_out\texact\tadmissible\tin_labels\tout_"
           "labels\tcv_accuracy\n";
    for (const auto& g : report.games) {
      for (const auto& [latent, r] : g.directional) {
        out << to_string(g.game) << '\t' << latent << '\t' << r.exact_in << '\t' << r.admissible_in << '\t'
            << r.exact_out << '\t' << r.admissible_out << '\t' << r.exact << '\t' << r.admissible << '\t'
            << r.in_labels << '\t' << r.out_labels << '\t';
        if (g.cv_accuracy) out << *g.cv_accuracy * 100.0; else out << "NA";
        out << '\n';
      }
    }
  }
  auto write_blends = [&](const std::filesystem::path& path, bool three) {
    auto out = open_report(path);
    out << "blend\tlatent\tgame_bits\tpredicted_game\tpercent\tsamples\n";
    for (const auto& b : report.blends) {
      if ((b.games.size() >= 3) != three) continue;
      for (const auto& [latent, rows] : b.rows) {
        for (const auto& row : rows) {
          for (std::size_t i = 0; i < b.games.size(); ++i) {
            out << blend_name(b.games) << '\t' << latent << '\t' << bits_to_string(row.game_bits) << '\t'
                << to_string(b.games[i]) << '\t' << row.percent[i] << '\t' << row.samples << '\n';
          }
        }
      }
    }
  };
  write_blends(dir / "table2_blends.tsv", false);
  write_blends(dir / "table3_blend3.tsv", true);
  {
    auto out = open_report(dir / "table4_density_symmetry.tsv");
    out << "game\tcolumn\tdensity_mean\tdensity_std\tdensity_p\tdensity_significant\tsymmetry_mean\tsymmetry_"
           "std\tsymmetry_p\tsymmetry_significant\n";
    for (const auto& g : report.games) {
      out << to_string(g.game) << "\toriginal\t" << g.original_density.mean << '\t' << g.original_density.std
          << "\tNA\tNA\t" << g.original_symmetry.mean << '\t' << g.original_symmetry.std << "\tNA\tNA\n";
      for (const auto& [latent, s] : g.density_symmetry) {
        out << to_string(g.game) << '\t' << latent << '\t' << s.density.mean << '\t' << s.density.std << '\t'
            << s.density_p << '\t' << (s.density_significant ? 1 : 0) << '\t' << s.symmetry.mean << '\t'
            << s.symmetry.std << '\t' << s.symmetry_p << '\t' << (s.symmetry_significant ? 1 : 0) << '\n';
      }
    }
  }
  {
    auto out = open_report(dir / "table5_novelty.tsv");
    out << "game\tlatent\tin\tout\toverall\n";
    for (const auto& g : report.games) {
      for (const auto& [latent, r] : g.novelty) {
        out << to_string(g.game) << '\t' << latent << '\t' << r.in << '\t' << r.out << '\t' << r.overall << '\n';
      }
    }
  }
  {
    auto out = open_report(dir / "edistance.tsv");
    out << "blend\tlatent\tgame_bits\tgame\tvalue\n";
    for (const auto& b : report.blends) {
      for (const auto& [latent, entries] : b.edistance) {
        for (const auto& e : entries) {
          out << blend_name(b.games) << '\t' << latent << '\t' << bits_to_string(e.game_bits) << '\t'
              << to_string(e.game) << '\t' << std::setprecision(6) << e.value << std::setprecision(4) << '\n';
        }
      }
    }
  }
  write_png(plot_edistance(report), dir / "edistance.png");

  auto out = open_report(dir / "summary.md");
  out << "# Evaluation summary\n\n";
  out << "Mode: " << to_string(report.mode) << ", seed " << report.seed << ", " << report.epochs << " epochs, "
      << report.n_latents << " latents per label, " << report.blend_latents << " latents per blend label.\n\n";
  out << "## Table 1: directional label accuracy (%)\n\n";
  out << "| Game | Latent | Exact-IN | Admissible-IN | Exact-OUT | Admissible-OUT | CV accuracy |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& g : report.games) {
    for (const auto& [latent, r] : g.directional) {
      out << "| " << to_string(g.game) << " | " << latent << " | " << fmt(r.exact_in) << " | "
          << fmt(r.admissible_in) << " | " << (r.out_labels ? fmt(r.exact_out) : "-") << " | "
          << (r.out_labels ? fmt(r.admissible_out) : "-") << " | "
          << (g.cv_accuracy ? fmt(*g.cv_accuracy * 100.0, 1) : std::string("-")) << " |\n";
    }
  }
  for (int table = 2; table <= 3; ++table) {
    out << "\n## Table " << table << ": blend accuracy (% predicted per game)\n\n";
    for (const auto& b : report.blends) {
      if ((b.games.size() >= 3) != (table == 3)) continue;
      for (const auto& [latent, rows] : b.rows) {
        out << "**" << blend_name(b.games) << ", latent " << latent << "**\n\n| Label |";
        for (GameId g : b.games) out << ' ' << to_string(g) << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < b.games.size(); ++i) out << "---|";
        out << '\n';
        for (const auto& row : rows) {
          out << "| (" << bits_to_string(row.game_bits) << ") |";
          for (double p : row.percent) out << ' ' << fmt(p, 1) << " |";
          out << '\n';
        }
        out << '\n';
      }
    }
  }
  out << "\n## Table 4: density and symmetry (mean ± std; * marks p < .05)\n\n";
  out << "| Game | Column | Density | Symmetry |\n|---|---|---|---|\n";
  for (const auto& g : report.games) {
    out << "| " << to_string(g.game) << " | original | " << fmt(g.original_density.mean) << " ± "
        << fmt(g.original_density.std) << " | " << fmt(g.original_symmetry.mean) << " ± "
        << fmt(g.original_symmetry.std) << " |\n";
    for (const auto& [latent, s] : g.density_symmetry) {
      out << "| " << to_string(g.game) << " | " << latent << " | " << fmt(s.density.mean) << " ± "
          << fmt(s.density.std) << (s.density_significant ? " *" : "") << " | " << fmt(s.symmetry.mean) << " ± "
          << fmt(s.symmetry.std) << (s.symmetry_significant ? " *" : "") << " |\n";
    }
  }
  out << "\n## Table 5: novelty (%)\n\n| Game | Latent | IN | OUT | Overall |\n|---|---|---|---|---|\n";
  for (const auto& g : report.games) {
    for (const auto& [latent, r] : g.novelty) {
      out << "| " << to_string(g.game) << " | " << latent << " | " << fmt(r.in, 1) << " | " << fmt(r.out, 1) << " | "
          << fmt(r.overall, 1) << " |\n";
    }
  }
  out << "\n## E-distance\n\nValues are in edistance.tsv; edistance.png draws one panel per blend and latent "
         "size, one line per original corpus (red, blue, green in game order) over the game-bit labels in "
         "counting order.\n";
}

}  // namespace segblend

#include "segblend/assembler.hpp"

#include "segblend/corpus.hpp"
#include "segblend/errors.hpp"

#include <cmath>
#include <sstream>

namespace segblend {

std::size_t Level::segment_rows() const {
  return placements.empty() ? 0 : placements.begin()->second.segment.grid.rows();
}

std::size_t Level::segment_cols() const {
  return placements.empty() ? 0 : placements.begin()->second.segment.grid.cols();
}

namespace {

std::string cell_provenance(Position p, std::uint64_t seed, const ConditionLabel& label) {
  return "cell " + std::to_string(p.row) + "," + std::to_string(p.col) + " seed " + std::to_string(seed) +
         " label " + label.to_string();
}

}  // namespace

Level assemble(const Layout& layout, const CvaeModel& model, const GameBitPolicy& policy, Rng& rng) {
  if (model.label_width() != 4 + policy.width()) {
    throw ShapeError("model label width " + std::to_string(model.label_width()) + " does not match 4 + " +
                     std::to_string(policy.width()) + " game bits");
  }
  Level level{layout, {}};
  for (const auto& [p, cell] : layout.cells) {
    const std::uint64_t seed = rng();
    const ConditionLabel label = cell_condition_label(cell, policy.draw(rng));
    Rng cell_rng(seed);
    Placement placement{model.generate(label, cell_rng), label, seed, 0, false};
    placement.segment.provenance = cell_provenance(p, seed, label);
    level.placements.emplace(p, std::move(placement));
  }
  return level;
}

Level assemble_multi(const Layout& layout, std::span<const CvaeModel* const> models,
                     std::span<const double> probabilities, Rng& rng) {
  if (models.empty()) throw PreconditionError("assemble_multi needs at least one model");
  if (probabilities.size() != models.size()) {
    throw PreconditionError("got " + std::to_string(probabilities.size()) + " probabilities for " +
                            std::to_string(models.size()) + " models");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw PreconditionError("model probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PreconditionError("model probabilities must sum to 1");

  std::size_t rows = 0;
  const std::size_t cols = models[0]->architecture().cols;
  for (const CvaeModel* m : models) {
    if (m->label_width() != 4) throw ShapeError("assemble_multi takes single-game models");
    if (m->architecture().cols != cols) throw ShapeError("models disagree on segment width");
    rows = std::max(rows, m->architecture().rows);
  }
  std::vector<bool> pad(models.size(), false);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& arch = models[i]->architecture();
    if (arch.rows == rows) continue;
    if (arch.games.front() == GameId::Zelda && arch.rows == 11 && arch.cols == 16 && rows == 15) {
      pad[i] = true;
    } else {
      throw ShapeError("model " + std::to_string(i) + " has " + std::to_string(arch.rows) + "x" +
                       std::to_string(arch.cols) + " segments, others have " + std::to_string(rows) + " rows");
    }
  }

  std::discrete_distribution<std::size_t> pick(probabilities.begin(), probabilities.end());
  Level level{layout, {}};
  for (const auto& [p, cell] : layout.cells) {
    const std::size_t index = pick(rng);
    const std::uint64_t seed = rng();
    const ConditionLabel label = cell_condition_label(cell);
    Rng cell_rng(seed);
    Placement placement{models[index]->generate(label, cell_rng), label, seed, index, pad[index]};
    if (pad[index]) placement.segment.grid = pad_zelda_room(placement.segment.grid);
    placement.segment.provenance = cell_provenance(p, seed, label);
    level.placements.emplace(p, std::move(placement));
  }
  return level;
}

std::string format_level(const Level& level) {
  std::ostringstream out;
  out << format_layout(level.layout);
  for (const auto& [p, pl] : level.placements) {
    out << "cell " << p.row << ' ' << p.col << " model " << pl.model_index << " seed " << pl.latent_seed
        << " label " << pl.label.to_string() << " game " << to_string(pl.segment.game) << " padded "
        << (pl.padded ? 1 : 0) << ' ' << pl.segment.grid.rows() << ' ' << pl.segment.grid.cols() << '\n';
    out << pl.segment.grid.to_text() << '\n';
  }
  return out.str();
}

Level parse_level_file(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  std::getline(in, header);
  std::ostringstream layout_text;
  layout_text << header << '\n';
  std::istringstream head(header);
  std::string tag;
  std::size_t steps = 0;
  std::size_t count = 0;
  if (!(head >> tag >> steps >> count) || tag != "layout") throw FormatError("level file lacks a layout header");
  std::string line;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw FormatError("level file layout block is truncated");
    layout_text << line << '\n';
  }
  Level level{parse_layout(layout_text.str()), {}};
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw FormatError("level file is missing cell " + std::to_string(i));
    std::istringstream cell(line);
    Position p;
    Placement pl;
    std::string k_cell, k_model, k_seed, k_label, label_text, k_game, game, k_padded;
    int padded = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (!(cell >> k_cell >> p.row >> p.col >> k_model >> pl.model_index >> k_seed >> pl.latent_seed >> k_label >>
          label_text >> k_game >> game >> k_padded >> padded >> rows >> cols) ||
        k_cell != "cell" || k_model != "model" || k_seed != "seed" || k_label != "label" || k_game != "game" ||
        k_padded != "padded") {
      throw FormatError("bad level cell header: " + line);
    }
    std::string tiles;
    for (std::size_t r = 0; r < rows; ++r) {
      if (!std::getline(in, line) || line.size() != cols) {
        throw FormatError("level cell " + std::to_string(p.row) + "," + std::to_string(p.col) + " row " +
                          std::to_string(r) + " is malformed");
      }
      tiles += line;
    }
    if (!level.layout.contains(p)) throw FormatError("level cell is not part of its layout");
    pl.label = ConditionLabel::parse(label_text);
    pl.padded = padded != 0;
    pl.segment = {TileGrid(rows, cols, std::move(tiles)), pl.label.directional, parse_game(game),
                  cell_provenance(p, pl.latent_seed, pl.label)};
    level.placements.emplace(p, std::move(pl));
  }
  return level;
}

}  // namespace segblend

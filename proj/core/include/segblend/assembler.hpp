#pragma once

#include "segblend/cvae.hpp"
#include "segblend/layout.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segblend {

struct Placement {
  AnnotatedSegment segment;
  ConditionLabel label;
  // Seed of the per-cell generator that drew the latent vector.
  std::uint64_t latent_seed = 0;
  std::size_t model_index = 0;
  // Set when an 11x16 Zelda room was padded to share a row height.
  bool padded = false;

  bool operator==(const Placement&) const = default;
};

struct Level {
  Layout layout;
  std::map<Position, Placement> placements;

  std::size_t segment_rows() const;
  std::size_t segment_cols() const;

  bool operator==(const Level&) const = default;
};

// One generate call per layout cell, in (row, col) order. Blend models get
// game bits drawn from the policy for every cell.
Level assemble(const Layout& layout, const CvaeModel& model, const GameBitPolicy& policy, Rng& rng);

// Turn-taking between single-game models: each cell picks a model by the
// given probabilities. Models must share a segment shape, except that 11x16
// Zelda models may join 15x16 models; their rooms are padded.
Level assemble_multi(const Layout& layout, std::span<const CvaeModel* const> models,
                     std::span<const double> probabilities, Rng& rng);

// Layout block, then per cell a header line and the segment rows:
//   cell <row> <col> model <i> seed <s> label <bits> game <name> padded <0|1> <rows> <cols>
std::string format_level(const Level& level);
Level parse_level_file(std::string_view text);

}  // namespace segblend

#pragma once

#include "segblend/cvae.hpp"
#include "segblend/seeding.hpp"
#include "segblend/tiles.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace segblend {

struct Position {
  std::int64_t row = 0;
  std::int64_t col = 0;

  auto operator<=>(const Position&) const = default;
};

Position neighbor(Position p, Side side);

struct LayoutCell {
  Position position;
  DirectionalLabel sides;  // 1 = open

  bool operator==(const LayoutCell&) const = default;
};

struct Layout {
  // Ordered by (row, col).
  std::map<Position, LayoutCell> cells;
  std::size_t step_count = 0;

  std::size_t size() const { return cells.size(); }
  const LayoutCell& at(Position p) const;
  bool contains(Position p) const { return cells.count(p) != 0; }

  // Bounding box of all cell positions.
  Position min_position() const;
  Position max_position() const;

  bool operator==(const Layout&) const = default;
};

// Starts from one all-closed cell at (0,0) and performs a uniformly drawn
// number of steps in [min_steps, max_steps]. A step picks a cell and a side
// uniformly; an already open side is re-drawn. After 100 * steps draws the
// layout is returned as is.
Layout generate_layout(std::size_t min_steps, std::size_t max_steps, Rng& rng);

// Empty when the layout is valid, else one message per violation:
// open side without neighbour, one-sided opening, disconnected cells.
std::vector<std::string> check_layout(const Layout& layout);

ConditionLabel cell_condition_label(const LayoutCell& cell, std::vector<std::uint8_t> game_bits = {});

// Per-cell game-bit draws for blend models: bit i is 1 with probability[i].
struct GameBitPolicy {
  std::vector<double> probabilities;

  static GameBitPolicy none() { return {}; }
  static GameBitPolicy uniform(std::size_t games) { return {std::vector<double>(games, 0.5)}; }
  // Deterministic bits (probability 0 or 1).
  static GameBitPolicy fixed(std::vector<std::uint8_t> bits);

  std::size_t width() const { return probabilities.size(); }
  std::vector<std::uint8_t> draw(Rng& rng) const;
};

// One line per cell: "row col U D L R", preceded by "layout <steps> <cells>".
std::string format_layout(const Layout& layout);
Layout parse_layout(std::string_view text);

}  // namespace segblend

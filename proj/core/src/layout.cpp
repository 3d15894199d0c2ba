#include "segblend/layout.hpp"

#include "segblend/errors.hpp"

#include <deque>
#include <set>
#include <sstream>

namespace segblend {

Position neighbor(Position p, Side side) {
  switch (side) {
    case Side::Up: return {p.row - 1, p.col};
    case Side::Down: return {p.row + 1, p.col};
    case Side::Left: return {p.row, p.col - 1};
    case Side::Right: return {p.row, p.col + 1};
  }
  return p;
}

const LayoutCell& Layout::at(Position p) const {
  auto it = cells.find(p);
  if (it == cells.end()) {
    throw PreconditionError("no layout cell at " + std::to_string(p.row) + "," + std::to_string(p.col));
  }
  return it->second;
}

Position Layout::min_position() const {
  if (cells.empty()) return {};
  Position m = cells.begin()->first;
  for (const auto& [p, _] : cells) {
    m.row = std::min(m.row, p.row);
    m.col = std::min(m.col, p.col);
  }
  return m;
}

Position Layout::max_position() const {
  if (cells.empty()) return {};
  Position m = cells.begin()->first;
  for (const auto& [p, _] : cells) {
    m.row = std::max(m.row, p.row);
    m.col = std::max(m.col, p.col);
  }
  return m;
}

Layout generate_layout(std::size_t min_steps, std::size_t max_steps, Rng& rng) {
  if (min_steps == 0) throw PreconditionError("layout needs at least one step");
  if (min_steps > max_steps) throw PreconditionError("layout step range is empty");
  std::uniform_int_distribution<std::size_t> step_dist(min_steps, max_steps);
  const std::size_t steps = step_dist(rng);

  Layout layout;
  layout.step_count = steps;
  layout.cells[{0, 0}] = LayoutCell{{0, 0}, {}};
  std::vector<Position> order{{0, 0}};
  std::uniform_int_distribution<int> side_dist(0, 3);

  std::size_t done = 0;
  std::size_t draws = 0;
  const std::size_t cap = 100 * steps;
  while (done < steps && draws < cap) {
    ++draws;
    std::uniform_int_distribution<std::size_t> cell_dist(0, order.size() - 1);
    const Position p = order[cell_dist(rng)];
    const Side side = static_cast<Side>(side_dist(rng));
    LayoutCell& cell = layout.cells[p];
    if (cell.sides.open(side)) continue;
    const Position q = neighbor(p, side);
    auto it = layout.cells.find(q);
    if (it == layout.cells.end()) {
      it = layout.cells.emplace(q, LayoutCell{q, {}}).first;
      order.push_back(q);
    }
    // std::map insertion leaves `cell` valid.
    cell.sides.set(side, true);
    it->second.sides.set(opposite(side), true);
    ++done;
  }
  return layout;
}

std::vector<std::string> check_layout(const Layout& layout) {
  std::vector<std::string> problems;
  auto where = [](Position p) { return std::to_string(p.row) + "," + std::to_string(p.col); };
  for (const auto& [p, cell] : layout.cells) {
    if (cell.position != p) problems.push_back("cell keyed " + where(p) + " records " + where(cell.position));
    for (Side s : kAllSides) {
      const auto it = layout.cells.find(neighbor(p, s));
      if (cell.sides.open(s)) {
        if (it == layout.cells.end()) {
          problems.push_back("cell " + where(p) + " opens toward a missing neighbour");
        } else if (!it->second.sides.open(opposite(s))) {
          problems.push_back("cell " + where(p) + " opening is not mirrored");
        }
      }
    }
  }
  if (!layout.cells.empty()) {
    std::set<Position> seen{layout.cells.begin()->first};
    std::deque<Position> queue{layout.cells.begin()->first};
    while (!queue.empty()) {
      const Position p = queue.front();
      queue.pop_front();
      const LayoutCell& cell = layout.cells.at(p);
      for (Side s : kAllSides) {
        const Position q = neighbor(p, s);
        const auto it = layout.cells.find(q);
        if (cell.sides.open(s) && it != layout.cells.end() && it->second.sides.open(opposite(s)) &&
            seen.insert(q).second) {
          queue.push_back(q);
        }
      }
    }
    if (seen.size() != layout.cells.size()) {
      problems.push_back("layout is disconnected: " + std::to_string(seen.size()) + " of " +
                         std::to_string(layout.cells.size()) + " cells reachable");
    }
  }
  return problems;
}

ConditionLabel cell_condition_label(const LayoutCell& cell, std::vector<std::uint8_t> game_bits) {
  return {cell.sides, std::move(game_bits)};
}

GameBitPolicy GameBitPolicy::fixed(std::vector<std::uint8_t> bits) {
  GameBitPolicy p;
  for (auto b : bits) p.probabilities.push_back(b ? 1.0 : 0.0);
  return p;
}

std::vector<std::uint8_t> GameBitPolicy::draw(Rng& rng) const {
  std::vector<std::uint8_t> bits;
  bits.reserve(probabilities.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double p : probabilities) {
    if (p < 0.0 || p > 1.0) throw PreconditionError("game-bit probability outside [0, 1]");
    bits.push_back(unit(rng) < p ? 1 : 0);
  }
  return bits;
}

std::string format_layout(const Layout& layout) {
  std::ostringstream out;
  out << "layout " << layout.step_count << ' ' << layout.cells.size() << '\n';
  for (const auto& [p, cell] : layout.cells) {
    const auto b = cell.sides.bits();
    out << p.row << ' ' << p.col << ' ' << int(b[0]) << ' ' << int(b[1]) << ' ' << int(b[2]) << ' '
        << int(b[3]) << '\n';
  }
  return out.str();
}

Layout parse_layout(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tag;
  std::size_t count = 0;
  Layout layout;
  if (!(in >> tag >> layout.step_count >> count) || tag != "layout") {
    throw FormatError("layout text must start with 'layout <steps> <cells>'");
  }
  for (std::size_t i = 0; i < count; ++i) {
    Position p;
    int bits[4];
    if (!(in >> p.row >> p.col >> bits[0] >> bits[1] >> bits[2] >> bits[3])) {
      throw FormatError("layout cell " + std::to_string(i) + " is truncated");
    }
    for (int b : bits) {
      if (b != 0 && b != 1) throw FormatError("layout cell " + std::to_string(i) + " has a non-binary side");
    }
    if (!layout.cells.emplace(p, LayoutCell{p, DirectionalLabel::from_bits(bits)}).second) {
      throw FormatError("layout cell " + std::to_string(i) + " repeats a position");
    }
  }
  return layout;
}

}  // namespace segblend

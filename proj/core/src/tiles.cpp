#include "segblend/tiles.hpp"

#include "segblend/errors.hpp"

#include <algorithm>
#include <cctype>

namespace segblend {

std::string_view to_string(GameId game) {
  switch (game) {
    case GameId::Zelda:
      return "zelda";
    case GameId::Metroid:
      return "metroid";
    case GameId::MegaMan:
      return "megaman";
    case GameId::LodeRunner:
      return "loderunner";
  }
  return "unknown";
}

GameId parse_game(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "zelda") return GameId::Zelda;
  if (lower == "metroid") return GameId::Metroid;
  if (lower == "megaman" || lower == "mm") return GameId::MegaMan;
  if (lower == "loderunner" || lower == "lr") return GameId::LodeRunner;
  throw ConfigError("unknown game '" + std::string(name) + "'");
}

TileGrid::TileGrid(std::size_t rows, std::size_t cols, char fill)
    : rows_(rows), cols_(cols), tiles_(rows * cols, fill) {}

TileGrid::TileGrid(std::size_t rows, std::size_t cols, std::string tiles)
    : rows_(rows), cols_(cols), tiles_(std::move(tiles)) {
  if (tiles_.size() != rows_ * cols_) {
    throw ShapeError("tile count " + std::to_string(tiles_.size()) + " does not match " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

TileGrid TileGrid::crop(std::size_t row0, std::size_t col0, std::size_t rows,
                        std::size_t cols) const {
  if (row0 + rows > rows_ || col0 + cols > cols_) {
    throw ShapeError("crop window exceeds grid bounds");
  }
  std::string out;
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    out.append(tiles_, (row0 + r) * cols_ + col0, cols);
  }
  return TileGrid(rows, cols, std::move(out));
}

TileGrid TileGrid::flipped_horizontal() const {
  TileGrid out = *this;
  for (std::size_t r = 0; r < rows_; ++r) {
    auto first = out.tiles_.begin() + static_cast<std::ptrdiff_t>(r * cols_);
    std::reverse(first, first + static_cast<std::ptrdiff_t>(cols_));
  }
  return out;
}

TileGrid TileGrid::flipped_vertical() const {
  TileGrid out = *this;
  for (std::size_t r = 0; r < rows_; ++r) {
    out.tiles_.replace(r * cols_, cols_, tiles_, (rows_ - 1 - r) * cols_, cols_);
  }
  return out;
}

std::string TileGrid::to_text() const {
  std::string out;
  out.reserve(rows_ * (cols_ + 1));
  for (std::size_t r = 0; r < rows_; ++r) {
    if (r > 0) out.push_back('\n');
    out.append(row(r));
  }
  return out;
}

Side opposite(Side side) {
  switch (side) {
    case Side::Up:
      return Side::Down;
    case Side::Down:
      return Side::Up;
    case Side::Left:
      return Side::Right;
    case Side::Right:
      return Side::Left;
  }
  return side;
}

DirectionalLabel DirectionalLabel::from_bits(std::span<const int> bits) {
  if (bits.size() != 4) {
    throw AnnotationError("directional label needs 4 bits, got " + std::to_string(bits.size()));
  }
  for (int b : bits) {
    if (b != 0 && b != 1) throw AnnotationError("label bits must be 0 or 1");
  }
  return {bits[0] == 1, bits[1] == 1, bits[2] == 1, bits[3] == 1};
}

DirectionalLabel DirectionalLabel::from_index(unsigned index) {
  if (index > 15) throw AnnotationError("directional label index out of range");
  return {(index & 8u) != 0, (index & 4u) != 0, (index & 2u) != 0, (index & 1u) != 0};
}

unsigned DirectionalLabel::index() const {
  return (up ? 8u : 0u) | (down ? 4u : 0u) | (left ? 2u : 0u) | (right ? 1u : 0u);
}

bool DirectionalLabel::open(Side side) const {
  switch (side) {
    case Side::Up:
      return up;
    case Side::Down:
      return down;
    case Side::Left:
      return left;
    case Side::Right:
      return right;
  }
  return false;
}

void DirectionalLabel::set(Side side, bool value) {
  switch (side) {
    case Side::Up:
      up = value;
      break;
    case Side::Down:
      down = value;
      break;
    case Side::Left:
      left = value;
      break;
    case Side::Right:
      right = value;
      break;
  }
}

std::array<std::uint8_t, 4> DirectionalLabel::bits() const {
  return {static_cast<std::uint8_t>(up), static_cast<std::uint8_t>(down),
          static_cast<std::uint8_t>(left), static_cast<std::uint8_t>(right)};
}

unsigned DirectionalLabel::open_count() const {
  return unsigned(up) + unsigned(down) + unsigned(left) + unsigned(right);
}

std::string DirectionalLabel::to_string() const {
  std::string out;
  for (auto b : bits()) {
    if (!out.empty()) out.push_back(',');
    out.push_back(b ? '1' : '0');
  }
  return out;
}

std::array<DirectionalLabel, 16> all_directional_labels() {
  std::array<DirectionalLabel, 16> out;
  for (unsigned i = 0; i < 16; ++i) out[i] = DirectionalLabel::from_index(i);
  return out;
}

std::string make_provenance(std::string_view level_id, std::size_t row, std::size_t col) {
  return std::string(level_id) + "@" + std::to_string(row) + "," + std::to_string(col);
}

}  // namespace segblend

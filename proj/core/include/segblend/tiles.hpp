#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segblend {

enum class GameId { Zelda, Metroid, MegaMan, LodeRunner };

inline constexpr std::array<GameId, 4> kAllGames = {
    GameId::Zelda, GameId::Metroid, GameId::MegaMan, GameId::LodeRunner};

std::string_view to_string(GameId game);

// Accepts the canonical lowercase names ("zelda", "metroid", "megaman",
// "loderunner") plus the short forms "mm" and "lr".
GameId parse_game(std::string_view name);

// Row-major rectangular grid of tile characters.
class TileGrid {
 public:
  TileGrid() = default;
  TileGrid(std::size_t rows, std::size_t cols, char fill);
  TileGrid(std::size_t rows, std::size_t cols, std::string tiles);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return tiles_.size(); }
  bool empty() const { return tiles_.empty(); }

  char at(std::size_t row, std::size_t col) const { return tiles_[row * cols_ + col]; }
  void set(std::size_t row, std::size_t col, char tile) { tiles_[row * cols_ + col] = tile; }

  std::string_view row(std::size_t r) const {
    return std::string_view(tiles_).substr(r * cols_, cols_);
  }
  const std::string& tiles() const { return tiles_; }

  TileGrid crop(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const;
  TileGrid flipped_horizontal() const;
  TileGrid flipped_vertical() const;

  // Rows joined by '\n', no trailing newline.
  std::string to_text() const;

  bool operator==(const TileGrid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::string tiles_;
};

enum class Side { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr std::array<Side, 4> kAllSides = {Side::Up, Side::Down, Side::Left, Side::Right};

Side opposite(Side side);

// Four open/closed bits in the fixed order Up, Down, Left, Right.
struct DirectionalLabel {
  bool up = false;
  bool down = false;
  bool left = false;
  bool right = false;

  static DirectionalLabel from_bits(std::span<const int> bits);

  // Index = 8*up + 4*down + 2*left + right, so (1,0,0,1) is 9.
  static DirectionalLabel from_index(unsigned index);
  unsigned index() const;

  bool open(Side side) const;
  void set(Side side, bool value);

  std::array<std::uint8_t, 4> bits() const;
  unsigned open_count() const;

  // "1,0,0,1"
  std::string to_string() const;

  auto operator<=>(const DirectionalLabel&) const = default;
};

// All sixteen labels in index order.
std::array<DirectionalLabel, 16> all_directional_labels();

struct AnnotatedSegment {
  TileGrid grid;
  DirectionalLabel label;
  GameId game = GameId::Zelda;
  // "<level id>@<row>,<col>" with an optional "#h" / "#v" flip suffix.
  std::string provenance;

  bool operator==(const AnnotatedSegment&) const = default;
};

std::string make_provenance(std::string_view level_id, std::size_t row, std::size_t col);

}  // namespace segblend

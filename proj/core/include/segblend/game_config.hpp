#pragma once

#include "segblend/tiles.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>

namespace segblend {

// Per-game tile semantics. Everything here comes from the games config file
// so users can retarget character sets without recompiling.
struct GameSpec {
  GameId id = GameId::Zelda;
  std::size_t segment_rows = 0;
  std::size_t segment_cols = 0;
  std::string vocabulary;
  std::string solid;
  std::string passable;
  std::string doors;
  // Tiles that mark unplayable space. Segments made only of these are dropped.
  std::string filler;

  bool in_vocabulary(char tile) const { return vocabulary.find(tile) != std::string::npos; }
  bool is_solid(char tile) const { return solid.find(tile) != std::string::npos; }
  bool is_passable(char tile) const { return passable.find(tile) != std::string::npos; }
  bool is_door(char tile) const { return doors.find(tile) != std::string::npos; }
  bool is_filler(char tile) const { return filler.find(tile) != std::string::npos; }
};

class GameConfig {
 public:
  static GameConfig load(const std::filesystem::path& path);
  static GameConfig parse(std::string_view json_text);

  // Loads games.json from default_data_dir().
  static GameConfig load_default();

  const GameSpec& game(GameId id) const;

 private:
  std::map<GameId, GameSpec> games_;
};

// A tile counts as solid in a blend when every blended game that knows the
// character treats it as solid.
std::string blend_solid_set(const GameConfig& config, std::span<const GameId> games);

// Resolution order: $SEGBLEND_DATA_DIR, the source tree's data/ directory,
// then the installed share directory.
std::filesystem::path default_data_dir();

}  // namespace segblend

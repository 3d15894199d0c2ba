#pragma once

#include "segblend/corpus.hpp"
#include "segblend/game_config.hpp"

#include <cstdlib>
#include <filesystem>
#include <string>

namespace segblend::test {

inline std::filesystem::path fixtures_dir() { return SEGBLEND_TEST_FIXTURES; }
inline std::filesystem::path data_dir() { return SEGBLEND_TEST_DATA; }

inline const GameConfig& games() {
  static const GameConfig config = GameConfig::load(data_dir() / "games.json");
  return config;
}

inline Corpus fixture_corpus(GameId game, IngestOptions options = {}) {
  const std::filesystem::path dir = fixtures_dir() / std::string(to_string(game));
  const std::vector<std::filesystem::path> inputs{dir};
  return ingest_levels(inputs, games().game(game), options);
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("segblend_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// An 11x16 Zelda room: wall perimeter two tiles thick, floor inside and a
// door tile in the middle of each open side.
inline TileGrid zelda_room(bool up, bool down, bool left, bool right) {
  TileGrid room(11, 16, 'W');
  for (std::size_t r = 2; r < 9; ++r) {
    for (std::size_t c = 2; c < 14; ++c) room.set(r, c, 'F');
  }
  if (up) room.set(0, 7, 'D'), room.set(1, 7, 'D');
  if (down) room.set(10, 7, 'D'), room.set(9, 7, 'D');
  if (left) room.set(5, 0, 'D'), room.set(5, 1, 'D');
  if (right) room.set(5, 15, 'D'), room.set(5, 14, 'D');
  return room;
}

}  // namespace segblend::test

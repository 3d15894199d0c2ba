// Writes small synthetic level sets in the VGLC text layout, one directory
// per game. The levels follow each game's structural conventions (room and
// screen sizes, wall perimeters, door and opening placement) so the full
// pipeline can run without the original corpus.

#include <CLI11.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

using Rng = std::mt19937_64;
using Canvas = std::vector<std::string>;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

struct Cell {
  std::array<bool, 4> open{};  // U D L R
};

// Random connected set of cells inside a rows x cols map, grown from a
// random start. Openings are mutual. With `path_only` the growth is a
// self-avoiding walk, as in side-scrolling stages.
std::map<std::pair<int, int>, Cell> grow_map(Rng& rng, int rows, int cols, int target, bool path_only) {
  std::map<std::pair<int, int>, Cell> cells;
  std::pair<int, int> cur{uniform(rng, 0, rows - 1), uniform(rng, 0, cols - 1)};
  cells[cur] = {};
  const std::array<std::pair<int, int>, 4> step = {{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
  int attempts = 0;
  while (static_cast<int>(cells.size()) < target && attempts++ < target * 200) {
    std::pair<int, int> from = cur;
    if (!path_only) {
      auto it = cells.begin();
      std::advance(it, uniform(rng, 0, static_cast<int>(cells.size()) - 1));
      from = it->first;
    }
    const int s = uniform(rng, 0, 3);
    const std::pair<int, int> to{from.first + step[s].first, from.second + step[s].second};
    if (to.first < 0 || to.first >= rows || to.second < 0 || to.second >= cols) continue;
    const bool exists = cells.count(to) != 0;
    if (path_only && exists) continue;
    // Occasionally add a loop between existing cells in branching maps.
    if (exists && !chance(rng, 0.15)) continue;
    cells[to];
    cells[from].open[s] = true;
    cells[to].open[s ^ 1] = true;
    cur = to;
  }
  return cells;
}

void write_level(const fs::path& path, const Canvas& canvas) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& row : canvas) out << row << '\n';
}

// ---- Zelda -----------------------------------------------------------------

Canvas zelda_room(Rng& rng, const Cell& cell, bool stairs) {
  Canvas room(11, std::string(16, 'W'));
  for (int r = 2; r <= 8; ++r) {
    for (int c = 2; c <= 13; ++c) room[r][c] = 'F';
  }
  auto mirror_set = [&](int r, int c, char t) {
    room[r][c] = t;
    room[r][15 - c] = t;
    room[10 - r][c] = t;
    room[10 - r][15 - c] = t;
  };
  switch (uniform(rng, 0, 5)) {
    case 0:
      break;
    case 1:  // pillars
      for (int r : {3, 4}) {
        for (int c : {4, 5}) mirror_set(r, c, 'B');
      }
      break;
    case 2:  // block ring
      for (int c = 4; c <= 11; ++c) room[3][c] = room[7][c] = 'B';
      room[3][7] = room[3][8] = room[7][7] = room[7][8] = 'F';
      break;
    case 3:  // moat
      for (int r = 3; r <= 7; ++r) {
        for (int c = 4; c <= 11; ++c) {
          if (r == 3 || r == 7 || c == 4 || c == 11) room[r][c] = 'P';
        }
      }
      room[5][5] = 'O';
      break;
    case 4:  // scattered symmetric blocks
      for (int k = 0; k < 3; ++k) mirror_set(uniform(rng, 3, 4), uniform(rng, 3, 6), 'B');
      break;
    default:  // central element block
      for (int r = 4; r <= 6; ++r) {
        for (int c = 6; c <= 9; ++c) room[r][c] = (r == 5 ? 'I' : 'P');
      }
      break;
  }
  const int monsters = uniform(rng, 0, 3);
  for (int k = 0; k < monsters; ++k) {
    const int r = uniform(rng, 2, 8), c = uniform(rng, 2, 13);
    if (room[r][c] == 'F') room[r][c] = 'M';
  }
  if (stairs) {
    room[uniform(rng, 3, 7)][uniform(rng, 3, 12)] = 'S';
  }
  if (cell.open[0]) room[0][7] = room[0][8] = room[1][7] = room[1][8] = 'D';
  if (cell.open[1]) room[9][7] = room[9][8] = room[10][7] = room[10][8] = 'D';
  if (cell.open[2]) room[5][0] = room[5][1] = 'D';
  if (cell.open[3]) room[5][14] = room[5][15] = 'D';
  return room;
}

void make_zelda(const fs::path& dir, Rng& rng, int dungeons) {
  for (int d = 0; d < dungeons; ++d) {
    const int rows = 4, cols = 5;
    auto cells = grow_map(rng, rows, cols, uniform(rng, 8, 11), false);
    // A detached stair room (no doors) in a free slot.
    for (int tries = 0; tries < 50; ++tries) {
      const std::pair<int, int> p{uniform(rng, 0, rows - 1), uniform(rng, 0, cols - 1)};
      if (!cells.count(p)) {
        cells[p].open = {false, false, false, false};
        break;
      }
    }
    Canvas level(rows * 11, std::string(cols * 16, '-'));
    for (const auto& [pos, cell] : cells) {
      const bool detached = !(cell.open[0] || cell.open[1] || cell.open[2] || cell.open[3]);
      const Canvas room = zelda_room(rng, cell, detached || chance(rng, 0.1));
      for (int r = 0; r < 11; ++r) level[pos.first * 11 + r].replace(pos.second * 16, 16, room[r]);
    }
    write_level(dir / ("tloz" + std::to_string(d + 1) + "_1.txt"), level);
  }
}

// ---- Metroid / Mega Man ------------------------------------------------------

struct PlatformerStyle {
  char solid = '#';
  char filler = '@';
  std::string decor;     // interior solids sprinkled on platforms
  std::string pickups;   // passable items
  char enemy = 'E';
  char hazard = '^';
  char door = 'D';
  char ladder = 0;       // Mega Man climbs shafts on ladders
};

Canvas platformer_screen(Rng& rng, const Cell& cell, const PlatformerStyle& st) {
  Canvas s(15, std::string(16, st.solid));
  for (int r = 2; r <= 12; ++r) {
    for (int c = 2; c <= 13; ++c) s[r][c] = '-';
  }
  // Floor thickness varies a little; the ceiling stays two tiles.
  if (chance(rng, 0.5)) {
    for (int c = 2; c <= 13; ++c) s[12][c] = st.solid;
  }
  if (cell.open[2]) {
    for (int r = 8; r <= 11; ++r) s[r][0] = s[r][1] = '-';
    if (st.door && chance(rng, 0.3)) s[9][0] = s[10][0] = st.door;
  }
  if (cell.open[3]) {
    for (int r = 8; r <= 11; ++r) s[r][14] = s[r][15] = '-';
    if (st.door && chance(rng, 0.3)) s[9][15] = s[10][15] = st.door;
  }
  const bool vertical = cell.open[0] || cell.open[1];
  if (cell.open[0]) {
    for (int c = 6; c <= 9; ++c) s[0][c] = s[1][c] = '-';
  }
  if (cell.open[1]) {
    for (int c = 6; c <= 9; ++c) {
      for (int r = 12; r <= 14; ++r) s[r][c] = '-';
    }
  }
  if (vertical && st.ladder) {
    const int top = cell.open[0] ? 0 : 4;
    const int bottom = cell.open[1] ? 14 : 11;
    for (int r = top; r <= bottom; ++r) s[r][7] = st.ladder;
  }
  // Platforms.
  const int platforms = uniform(rng, 1, 3);
  for (int k = 0; k < platforms; ++k) {
    const int r = uniform(rng, 4, 9);
    const int c0 = uniform(rng, 2, 9);
    const int len = uniform(rng, 2, 4);
    const char t = st.decor.empty() || chance(rng, 0.6) ? st.solid : st.decor[uniform(rng, 0, int(st.decor.size()) - 1)];
    for (int c = c0; c < std::min(14, c0 + len); ++c) {
      if (s[r][c] == '-') s[r][c] = t;
    }
  }
  if (chance(rng, 0.5)) {
    const int c = uniform(rng, 3, 12);
    if (s[11][c] == '-') s[11][c] = st.enemy;
  }
  if (chance(rng, 0.3)) {
    const int c = uniform(rng, 3, 12);
    if (s[11][c] == '-' && s[12][c] == st.solid) s[12][c] = st.hazard;
  }
  if (!st.pickups.empty() && chance(rng, 0.3)) {
    const int r = uniform(rng, 3, 10), c = uniform(rng, 3, 12);
    if (s[r][c] == '-') s[r][c] = st.pickups[uniform(rng, 0, int(st.pickups.size()) - 1)];
  }
  return s;
}

void make_platformer(const fs::path& dir, Rng& rng, const std::string& stem, int levels, int rows, int cols,
                     int screens, bool path_only, const PlatformerStyle& st) {
  for (int l = 0; l < levels; ++l) {
    const auto cells = grow_map(rng, rows, cols, screens, path_only);
    Canvas level(rows * 15, std::string(cols * 16, st.filler));
    for (const auto& [pos, cell] : cells) {
      const Canvas screen = platformer_screen(rng, cell, st);
      for (int r = 0; r < 15; ++r) level[pos.first * 15 + r].replace(pos.second * 16, 16, screen[r]);
    }
    // One sealed rock screen, which extraction must drop.
    for (int tries = 0; tries < 50; ++tries) {
      const std::pair<int, int> p{uniform(rng, 0, rows - 1), uniform(rng, 0, cols - 1)};
      if (!cells.count(p)) {
        for (int r = 0; r < 15; ++r) level[p.first * 15 + r].replace(p.second * 16, 16, std::string(16, st.solid));
        break;
      }
    }
    write_level(dir / (stem + std::to_string(l + 1) + ".txt"), level);
  }
}

// ---- Lode Runner ------------------------------------------------------------

Canvas lode_runner_level(Rng& rng) {
  Canvas s(22, std::string(32, '.'));
  for (int c = 0; c < 32; ++c) s[21][c] = 'b';
  for (int r = 4; r <= 19; r += uniform(rng, 3, 4)) {
    int c = uniform(rng, 0, 4);
    while (c < 32) {
      const int len = uniform(rng, 4, 12);
      for (int k = c; k < std::min(32, c + len); ++k) s[r][k] = chance(rng, 0.85) ? 'B' : 'b';
      c += len + uniform(rng, 2, 6);
    }
  }
  const int ladders = uniform(rng, 3, 6);
  for (int k = 0; k < ladders; ++k) {
    const int c = uniform(rng, 0, 31);
    const int top = uniform(rng, 1, 10);
    const int bottom = uniform(rng, top + 4, 20);
    for (int r = top; r <= bottom; ++r) s[r][c] = '#';
  }
  const int ropes = uniform(rng, 1, 3);
  for (int k = 0; k < ropes; ++k) {
    const int r = uniform(rng, 2, 17), c0 = uniform(rng, 0, 24);
    for (int c = c0; c < c0 + uniform(rng, 4, 8) && c < 32; ++c) {
      if (s[r][c] == '.') s[r][c] = '-';
    }
  }
  auto place = [&](char t, int n) {
    for (int k = 0; k < n; ++k) {
      for (int tries = 0; tries < 40; ++tries) {
        const int r = uniform(rng, 1, 20), c = uniform(rng, 0, 31);
        if (s[r][c] == '.' && (s[r + 1][c] == 'B' || s[r + 1][c] == 'b')) {
          s[r][c] = t;
          break;
        }
      }
    }
  };
  place('G', uniform(rng, 4, 10));
  place('E', uniform(rng, 1, 4));
  place('M', 1);
  return s;
}

void make_lode_runner(const fs::path& dir, Rng& rng, int levels) {
  for (int l = 0; l < levels; ++l) {
    char name[32];
    std::snprintf(name, sizeof name, "Level %d.txt", l + 1);
    write_level(dir / name, lode_runner_level(rng));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write synthetic VGLC-style level fixtures"};
  std::string out = "data/fixtures";
  std::uint64_t seed = 20201015;
  int zelda = 5, metroid = 4, megaman = 6, loderunner = 16;
  app.add_option("--out", out, "Output directory");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--zelda", zelda, "Zelda dungeons");
  app.add_option("--metroid", metroid, "Metroid maps");
  app.add_option("--megaman", megaman, "Mega Man stages");
  app.add_option("--loderunner", loderunner, "Lode Runner levels");
  CLI11_PARSE(app, argc, argv);

  Rng rng(seed);
  const fs::path root(out);
  for (const char* game : {"zelda", "metroid", "megaman", "loderunner"}) fs::create_directories(root / game);
  make_zelda(root / "zelda", rng, zelda);

  PlatformerStyle metroid_style;
  metroid_style.decor = "B()[]<>";
  metroid_style.pickups = "v";
  make_platformer(root / "metroid", rng, "metroid_", metroid, 5, 5, 16, false, metroid_style);

  PlatformerStyle mm_style;
  mm_style.decor = "BM";
  mm_style.pickups = "LlWw+*";
  mm_style.hazard = 'H';
  mm_style.enemy = 'C';
  mm_style.ladder = '|';
  mm_style.door = 0;
  make_platformer(root / "megaman", rng, "megaman_", megaman, 4, 6, 8, true, mm_style);

  make_lode_runner(root / "loderunner", rng, loderunner);
  std::cout << "wrote fixtures to " << root.string() << '\n';
  return 0;
}

#include "segblend/render.hpp"

#include "segblend/errors.hpp"
#include "segblend/game_config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace segblend {

Rgb parse_color(std::string_view text) {
  if (text.size() != 7 || text[0] != '#') throw ConfigError("colour '" + std::string(text) + "' is not #rrggbb");
  auto channel = [&](std::size_t at) {
    unsigned value = 0;
    for (std::size_t i = at; i < at + 2; ++i) {
      const char c = text[i];
      value *= 16;
      if (c >= '0' && c <= '9') value += static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') value += static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') value += static_cast<unsigned>(c - 'A' + 10);
      else throw ConfigError("colour '" + std::string(text) + "' is not #rrggbb");
    }
    return static_cast<std::uint8_t>(value);
  };
  return {channel(1), channel(3), channel(5)};
}

Image::Image(std::size_t width, std::size_t height, Rgb fill)
    : width_(width), height_(height), pixels_(width * height * 3) {
  for (std::size_t i = 0; i < width * height; ++i) {
    pixels_[3 * i] = fill.r;
    pixels_[3 * i + 1] = fill.g;
    pixels_[3 * i + 2] = fill.b;
  }
}

Rgb Image::at(std::size_t x, std::size_t y) const {
  const std::size_t i = 3 * (y * width_ + x);
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void Image::set(std::size_t x, std::size_t y, Rgb color) {
  const std::size_t i = 3 * (y * width_ + x);
  pixels_[i] = color.r;
  pixels_[i + 1] = color.g;
  pixels_[i + 2] = color.b;
}

void Image::fill_rect(std::int64_t x, std::int64_t y, std::int64_t w, std::int64_t h, Rgb color) {
  const auto x0 = std::max<std::int64_t>(0, x);
  const auto y0 = std::max<std::int64_t>(0, y);
  const auto x1 = std::min<std::int64_t>(static_cast<std::int64_t>(width_), x + w);
  const auto y1 = std::min<std::int64_t>(static_cast<std::int64_t>(height_), y + h);
  for (auto yy = y0; yy < y1; ++yy) {
    for (auto xx = x0; xx < x1; ++xx) set(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy), color);
  }
}

void Image::draw_line(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1, Rgb color) {
  const std::int64_t dx = std::abs(x1 - x0);
  const std::int64_t dy = -std::abs(y1 - y0);
  const std::int64_t sx = x0 < x1 ? 1 : -1;
  const std::int64_t sy = y0 < y1 ? 1 : -1;
  std::int64_t err = dx + dy;
  while (true) {
    fill_rect(x0, y0, 1, 1, color);
    if (x0 == x1 && y0 == y1) break;
    const std::int64_t e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

std::uint64_t Image::hash() const {
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto mix = [&](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001B3ull;
  };
  for (int shift = 0; shift < 64; shift += 8) mix(static_cast<std::uint8_t>(width_ >> shift));
  for (int shift = 0; shift < 64; shift += 8) mix(static_cast<std::uint8_t>(height_ >> shift));
  for (auto byte : pixels_) mix(byte);
  return h;
}

Rgb Tileset::color(char tile) const {
  const auto it = colors.find(tile);
  if (it == colors.end()) throw ConfigError("tileset has no colour for tile '" + std::string(1, tile) + "'");
  return it->second;
}

Tileset Tileset::parse(std::string_view json_text) {
  Tileset t;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    t.tile_size = doc.value("tile_size", t.tile_size);
    t.border = doc.value("border", t.border);
    if (doc.contains("background")) t.background = parse_color(doc.at("background").get<std::string>());
    if (doc.contains("border_color")) t.border_color = parse_color(doc.at("border_color").get<std::string>());
    if (doc.contains("opening_color")) t.opening_color = parse_color(doc.at("opening_color").get<std::string>());
    for (const auto& [key, value] : doc.at("colors").items()) {
      if (key.size() != 1) throw ConfigError("tileset key '" + key + "' is not a single character");
      t.colors[key[0]] = parse_color(value.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad tileset: ") + e.what());
  }
  if (t.tile_size == 0) throw ConfigError("tileset tile_size must be positive");
  if (t.border == 0) throw ConfigError("tileset border must be positive");
  return t;
}

Tileset Tileset::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

Tileset Tileset::load_default() { return load(default_data_dir() / "tileset.json"); }

namespace {

struct Extent {
  Position min;
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  std::size_t seg_rows = 0;
  std::size_t seg_cols = 0;
};

Extent measure(const Level& level) {
  if (level.layout.cells.empty()) throw PreconditionError("cannot render an empty level");
  Extent e;
  e.min = level.layout.min_position();
  const Position max = level.layout.max_position();
  e.grid_rows = static_cast<std::size_t>(max.row - e.min.row + 1);
  e.grid_cols = static_cast<std::size_t>(max.col - e.min.col + 1);
  for (const auto& [p, cell] : level.layout.cells) {
    const auto it = level.placements.find(p);
    if (it == level.placements.end()) {
      throw PreconditionError("layout cell " + std::to_string(p.row) + "," + std::to_string(p.col) +
                              " has no placement");
    }
    const TileGrid& g = it->second.segment.grid;
    if (e.seg_rows == 0) {
      e.seg_rows = g.rows();
      e.seg_cols = g.cols();
    } else if (g.rows() != e.seg_rows || g.cols() != e.seg_cols) {
      throw ShapeError("level mixes segment shapes; pad Zelda rooms before rendering");
    }
  }
  return e;
}

// Indices [first, last] of the middle one or two positions of a side.
std::pair<std::size_t, std::size_t> middle(std::size_t n) { return {(n - 1) / 2, n / 2}; }

}  // namespace

std::string render_text(const Level& level, const TextRenderOptions& options) {
  const Extent e = measure(level);
  const std::size_t height = e.grid_rows * (e.seg_rows + 1) + 1;
  const std::size_t width = e.grid_cols * (e.seg_cols + 1) + 1;
  std::vector<std::string> canvas(height, std::string(width, options.background));
  for (const auto& [p, cell] : level.layout.cells) {
    const std::size_t y0 = static_cast<std::size_t>(p.row - e.min.row) * (e.seg_rows + 1);
    const std::size_t x0 = static_cast<std::size_t>(p.col - e.min.col) * (e.seg_cols + 1);
    const std::size_t y1 = y0 + e.seg_rows + 1;
    const std::size_t x1 = x0 + e.seg_cols + 1;
    for (std::size_t x = x0; x <= x1; ++x) canvas[y0][x] = canvas[y1][x] = options.horizontal;
    for (std::size_t y = y0; y <= y1; ++y) canvas[y][x0] = canvas[y][x1] = options.vertical;
    canvas[y0][x0] = canvas[y0][x1] = canvas[y1][x0] = canvas[y1][x1] = options.corner;
    const TileGrid& g = level.placements.at(p).segment.grid;
    for (std::size_t r = 0; r < e.seg_rows; ++r) {
      for (std::size_t c = 0; c < e.seg_cols; ++c) canvas[y0 + 1 + r][x0 + 1 + c] = g.at(r, c);
    }
    if (options.opening != 0) {
      const auto [h0, h1] = middle(e.seg_cols);
      const auto [v0, v1] = middle(e.seg_rows);
      for (std::size_t c = h0; c <= h1; ++c) {
        if (cell.sides.up) canvas[y0][x0 + 1 + c] = options.opening;
        if (cell.sides.down) canvas[y1][x0 + 1 + c] = options.opening;
      }
      for (std::size_t r = v0; r <= v1; ++r) {
        if (cell.sides.left) canvas[y0 + 1 + r][x0] = options.opening;
        if (cell.sides.right) canvas[y0 + 1 + r][x1] = options.opening;
      }
    }
  }
  std::string out;
  for (const auto& line : canvas) out += line + '\n';
  return out;
}

Image render_image(const Level& level, const Tileset& tileset) {
  const Extent e = measure(level);
  const auto ts = static_cast<std::int64_t>(tileset.tile_size);
  const auto bw = static_cast<std::int64_t>(tileset.border);
  const std::int64_t cell_w = static_cast<std::int64_t>(e.seg_cols) * ts;
  const std::int64_t cell_h = static_cast<std::int64_t>(e.seg_rows) * ts;
  Image image(e.grid_cols * e.seg_cols * tileset.tile_size + (e.grid_cols + 1) * tileset.border,
              e.grid_rows * e.seg_rows * tileset.tile_size + (e.grid_rows + 1) * tileset.border, tileset.background);
  // Tiles are resolved first so a missing colour fails before any drawing.
  for (const auto& [p, pl] : level.placements) {
    for (char c : pl.segment.grid.tiles()) tileset.color(c);
  }
  for (const auto& [p, cell] : level.layout.cells) {
    const std::int64_t x0 = bw + (p.col - e.min.col) * (cell_w + bw);
    const std::int64_t y0 = bw + (p.row - e.min.row) * (cell_h + bw);
    image.fill_rect(x0 - bw, y0 - bw, cell_w + 2 * bw, bw, tileset.border_color);
    image.fill_rect(x0 - bw, y0 + cell_h, cell_w + 2 * bw, bw, tileset.border_color);
    image.fill_rect(x0 - bw, y0 - bw, bw, cell_h + 2 * bw, tileset.border_color);
    image.fill_rect(x0 + cell_w, y0 - bw, bw, cell_h + 2 * bw, tileset.border_color);
    const TileGrid& g = level.placements.at(p).segment.grid;
    for (std::size_t r = 0; r < e.seg_rows; ++r) {
      for (std::size_t c = 0; c < e.seg_cols; ++c) {
        image.fill_rect(x0 + static_cast<std::int64_t>(c) * ts, y0 + static_cast<std::int64_t>(r) * ts, ts, ts,
                        tileset.color(g.at(r, c)));
      }
    }
  }
  // Marks go last so a neighbour's border never paints over them.
  for (const auto& [p, cell] : level.layout.cells) {
    const std::int64_t x0 = bw + (p.col - e.min.col) * (cell_w + bw);
    const std::int64_t y0 = bw + (p.row - e.min.row) * (cell_h + bw);
    const auto [h0, h1] = middle(e.seg_cols);
    const auto [v0, v1] = middle(e.seg_rows);
    const std::int64_t hx = x0 + static_cast<std::int64_t>(h0) * ts;
    const std::int64_t hw = static_cast<std::int64_t>(h1 - h0 + 1) * ts;
    const std::int64_t vy = y0 + static_cast<std::int64_t>(v0) * ts;
    const std::int64_t vh = static_cast<std::int64_t>(v1 - v0 + 1) * ts;
    if (cell.sides.up) image.fill_rect(hx, y0 - bw, hw, bw, tileset.opening_color);
    if (cell.sides.down) image.fill_rect(hx, y0 + cell_h, hw, bw, tileset.opening_color);
    if (cell.sides.left) image.fill_rect(x0 - bw, vy, bw, vh, tileset.opening_color);
    if (cell.sides.right) image.fill_rect(x0 + cell_w, vy, bw, vh, tileset.opening_color);
  }
  return image;
}

Level single_segment_level(const AnnotatedSegment& segment) {
  Level level;
  level.layout.cells[{0, 0}] = LayoutCell{{0, 0}, segment.label};
  Placement pl;
  pl.segment = segment;
  pl.label = {segment.label, {}};
  level.placements.emplace(Position{0, 0}, std::move(pl));
  return level;
}

}  // namespace segblend

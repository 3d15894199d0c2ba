#pragma once

#include "segblend/assembler.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace segblend {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb&) const = default;
};

// "#rrggbb"
Rgb parse_color(std::string_view text);

// 8-bit RGB raster, row-major.
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, Rgb fill = {});

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  Rgb at(std::size_t x, std::size_t y) const;
  void set(std::size_t x, std::size_t y, Rgb color);
  // Clipped to the image.
  void fill_rect(std::int64_t x, std::int64_t y, std::int64_t w, std::int64_t h, Rgb color);
  void draw_line(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1, Rgb color);
  const std::vector<std::uint8_t>& pixels() const { return pixels_; }

  // FNV-1a over the dimensions and pixel bytes.
  std::uint64_t hash() const;

  bool operator==(const Image&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

std::vector<std::uint8_t> encode_png(const Image& image);
void write_png(const Image& image, const std::filesystem::path& path);

struct Tileset {
  std::size_t tile_size = 4;    // pixels per tile edge
  std::size_t border = 1;       // pixels between segments
  Rgb background{0, 0, 0};      // cells outside the layout
  Rgb border_color{255, 255, 255};
  Rgb opening_color{255, 0, 0};
  std::map<char, Rgb> colors;

  // Missing characters throw ConfigError naming the tile.
  Rgb color(char tile) const;

  // {"tile_size": 4, "border": 1, "background": "#000000", "colors": {"W": "#505050", ...}}
  static Tileset parse(std::string_view json_text);
  static Tileset load(const std::filesystem::path& path);
  // tileset.json from default_data_dir().
  static Tileset load_default();
};

struct TextRenderOptions {
  char background = ' ';
  char corner = '+';
  char horizontal = '-';
  char vertical = '|';
  // Drawn over the middle of an open side; 0 disables the marks.
  char opening = '=';
};

// Cells are laid out by layout position with one-character borders shared
// between neighbours; absent cells are filled with the background.
std::string render_text(const Level& level, const TextRenderOptions& options = {});

// Image size: cols * seg_cols * tile + (cols + 1) * border horizontally, and
// likewise vertically. Borders are white with red dashes over open sides.
Image render_image(const Level& level, const Tileset& tileset);

// A lone segment drawn with its own label's openings.
Level single_segment_level(const AnnotatedSegment& segment);

}  // namespace segblend

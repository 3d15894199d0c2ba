#pragma once

#include "segblend/game_config.hpp"
#include "segblend/tiles.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segblend {

// Parses VGLC-style level text: one character per tile, one line per row.
// Trailing '\r' and trailing blank lines are ignored.
TileGrid parse_level(std::string_view text, const GameSpec& game);

// Non-overlapping tiling of a level into the game's segment size.
//  - Zelda: 11x16 rooms, void-only windows skipped, labels from door tiles.
//  - Metroid / Mega Man: 15x16 screens, filler-only windows skipped, labels
//    left at (0,0,0,0) for auto_label_openings or an annotation sidecar.
//  - Lode Runner: the 22x32 level split into four quadrants labelled by the
//    neighbouring quadrants.
std::vector<AnnotatedSegment> extract_segments(const TileGrid& level, const GameSpec& game,
                                               std::string_view level_id);

// A side is open iff a door tile appears in its two-tile perimeter band.
DirectionalLabel derive_zelda_label(const TileGrid& room, const GameSpec& zelda);

// A side is open iff its border row/column holds a run of at least
// `min_run` consecutive passable (or door) tiles.
DirectionalLabel auto_label_openings(const TileGrid& segment, const GameSpec& game,
                                     std::size_t min_run = 2);

DirectionalLabel flip_label_horizontal(DirectionalLabel label);
DirectionalLabel flip_label_vertical(DirectionalLabel label);

// Adds the horizontal and vertical flip of every unflipped room unless an
// identical grid is already present. Segments whose provenance already
// carries a flip suffix are kept but not flipped again, which makes the
// operation idempotent.
std::vector<AnnotatedSegment> augment_zelda_flips(std::span<const AnnotatedSegment> rooms);

// 11x16 -> 15x16: rows 0-1 are repeated above the room and rows 9-10 below it.
TileGrid pad_zelda_room(const TileGrid& room);

struct Corpus {
  // Distinct games, in GameId order.
  std::vector<GameId> games;
  // Union of tile characters over all segments, ascending byte order.
  std::string vocabulary;
  std::vector<AnnotatedSegment> segments;

  std::size_t size() const { return segments.size(); }
  bool empty() const { return segments.empty(); }
  std::size_t segment_rows() const;
  std::size_t segment_cols() const;

  bool operator==(const Corpus&) const = default;
};

// Derives games and vocabulary; rejects duplicate provenance keys.
Corpus make_corpus(std::vector<AnnotatedSegment> segments);

std::string vocabulary_of(std::span<const AnnotatedSegment> segments);

// Directional label indices (0-15) present in the corpus.
std::set<unsigned> unique_label_indices(const Corpus& corpus);

std::string format_corpus(const Corpus& corpus);
Corpus parse_corpus(std::string_view text);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

// Sidecar records "<provenance> U D L R", '#' comments allowed.
std::map<std::string, DirectionalLabel> parse_annotations(std::string_view text);
std::map<std::string, DirectionalLabel> load_annotations(const std::filesystem::path& path);
// Returns the number of overridden labels; unknown keys are an error.
std::size_t apply_annotations(std::vector<AnnotatedSegment>& segments,
                              const std::map<std::string, DirectionalLabel>& annotations);

struct IngestOptions {
  bool augment_flips = true;  // Zelda only
  bool pad_to_blend_height = false;  // Zelda only: 11x16 -> 15x16
  std::size_t min_run = 2;
  std::optional<std::filesystem::path> annotations;
};

// Expands directories to their *.txt files (sorted) and runs the full
// per-game pipeline. Errors are re-thrown with the offending file name.
Corpus ingest_levels(std::span<const std::filesystem::path> inputs, const GameSpec& game,
                     const IngestOptions& options = {});

}  // namespace segblend

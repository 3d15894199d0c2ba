#include "segblend/corpus.hpp"

#include "segblend/errors.hpp"

#include <algorithm>
#include <cctype>
#include <array>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace segblend {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

bool all_filler(const TileGrid& grid, const GameSpec& game) {
  if (game.filler.empty()) return false;
  return std::all_of(grid.tiles().begin(), grid.tiles().end(),
                     [&](char t) { return game.is_filler(t); });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string sanitize_id(std::string id) {
  for (char& c : id) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '@' || c == '#') c = '_';
  }
  return id;
}

bool band_has_door(const TileGrid& room, const GameSpec& zelda, std::size_t r0, std::size_t r1,
                   std::size_t c0, std::size_t c1) {
  for (std::size_t r = r0; r < r1; ++r) {
    for (std::size_t c = c0; c < c1; ++c) {
      if (zelda.is_door(room.at(r, c))) return true;
    }
  }
  return false;
}

template <typename Fn>
std::size_t longest_run(std::size_t length, Fn&& passable_at) {
  std::size_t best = 0;
  std::size_t run = 0;
  for (std::size_t i = 0; i < length; ++i) {
    run = passable_at(i) ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

}  // namespace

TileGrid parse_level(std::string_view text, const GameSpec& game) {
  std::vector<std::string_view> lines = split_lines(text);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw FormatError("level text is empty");

  const std::size_t cols = lines.front().size();
  if (cols == 0) throw FormatError("level row 1 is empty");
  std::string tiles;
  tiles.reserve(lines.size() * cols);
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (lines[r].size() != cols) {
      throw FormatError("ragged level: row " + std::to_string(r + 1) + " has " +
                        std::to_string(lines[r].size()) + " columns, expected " +
                        std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const char tile = lines[r][c];
      if (!game.in_vocabulary(tile)) {
        throw VocabularyError("tile '" + std::string(1, tile) + "' at row " + std::to_string(r + 1) +
                              ", column " + std::to_string(c + 1) + " is not in the " +
                              std::string(to_string(game.id)) + " vocabulary");
      }
    }
    tiles.append(lines[r]);
  }
  return TileGrid(lines.size(), cols, std::move(tiles));
}

std::vector<AnnotatedSegment> extract_segments(const TileGrid& level, const GameSpec& game,
                                               std::string_view level_id) {
  const std::size_t seg_rows = game.segment_rows;
  const std::size_t seg_cols = game.segment_cols;
  const std::string id = sanitize_id(std::string(level_id));
  std::vector<AnnotatedSegment> out;

  if (game.id == GameId::LodeRunner) {
    if (level.rows() != 2 * seg_rows || level.cols() != 2 * seg_cols) {
      throw ExtractionError("Lode Runner levels must be " + std::to_string(2 * seg_rows) + "x" +
                            std::to_string(2 * seg_cols) + ", got " + std::to_string(level.rows()) +
                            "x" + std::to_string(level.cols()));
    }
    // Each quadrant is open toward the quadrants it touches.
    const std::array<DirectionalLabel, 4> quadrant_labels = {
        DirectionalLabel{false, true, false, true},   // top-left
        DirectionalLabel{false, true, true, false},   // top-right
        DirectionalLabel{true, false, false, true},   // bottom-left
        DirectionalLabel{true, false, true, false}};  // bottom-right
    for (std::size_t q = 0; q < 4; ++q) {
      const std::size_t r0 = (q / 2) * seg_rows;
      const std::size_t c0 = (q % 2) * seg_cols;
      out.push_back({level.crop(r0, c0, seg_rows, seg_cols), quadrant_labels[q], game.id,
                     make_provenance(id, r0, c0)});
    }
    return out;
  }

  if (level.rows() % seg_rows != 0 || level.cols() % seg_cols != 0) {
    throw ExtractionError(std::string(to_string(game.id)) + " level of " +
                          std::to_string(level.rows()) + "x" + std::to_string(level.cols()) +
                          " is not a whole number of " + std::to_string(seg_rows) + "x" +
                          std::to_string(seg_cols) + " segments");
  }
  for (std::size_t r0 = 0; r0 < level.rows(); r0 += seg_rows) {
    for (std::size_t c0 = 0; c0 < level.cols(); c0 += seg_cols) {
      TileGrid grid = level.crop(r0, c0, seg_rows, seg_cols);
      if (all_filler(grid, game)) continue;
      DirectionalLabel label;
      if (game.id == GameId::Zelda) label = derive_zelda_label(grid, game);
      out.push_back({std::move(grid), label, game.id, make_provenance(id, r0, c0)});
    }
  }
  return out;
}

DirectionalLabel derive_zelda_label(const TileGrid& room, const GameSpec& zelda) {
  constexpr std::size_t kBand = 2;
  if (room.rows() < 2 * kBand || room.cols() < 2 * kBand) {
    throw ShapeError("room too small for a two-tile wall perimeter");
  }
  const std::size_t rows = room.rows();
  const std::size_t cols = room.cols();
  DirectionalLabel label;
  label.up = band_has_door(room, zelda, 0, kBand, 0, cols);
  label.down = band_has_door(room, zelda, rows - kBand, rows, 0, cols);
  label.left = band_has_door(room, zelda, 0, rows, 0, kBand);
  label.right = band_has_door(room, zelda, 0, rows, cols - kBand, cols);
  return label;
}

DirectionalLabel auto_label_openings(const TileGrid& segment, const GameSpec& game,
                                     std::size_t min_run) {
  if (segment.empty()) return {};
  min_run = std::max<std::size_t>(min_run, 1);
  auto open = [&](char t) { return game.is_passable(t) || game.is_door(t); };
  const std::size_t last_row = segment.rows() - 1;
  const std::size_t last_col = segment.cols() - 1;
  DirectionalLabel label;
  label.up = longest_run(segment.cols(), [&](std::size_t c) { return open(segment.at(0, c)); }) >= min_run;
  label.down =
      longest_run(segment.cols(), [&](std::size_t c) { return open(segment.at(last_row, c)); }) >= min_run;
  label.left = longest_run(segment.rows(), [&](std::size_t r) { return open(segment.at(r, 0)); }) >= min_run;
  label.right =
      longest_run(segment.rows(), [&](std::size_t r) { return open(segment.at(r, last_col)); }) >= min_run;
  return label;
}

DirectionalLabel flip_label_horizontal(DirectionalLabel label) {
  std::swap(label.left, label.right);
  return label;
}

DirectionalLabel flip_label_vertical(DirectionalLabel label) {
  std::swap(label.up, label.down);
  return label;
}

std::vector<AnnotatedSegment> augment_zelda_flips(std::span<const AnnotatedSegment> rooms) {
  std::vector<AnnotatedSegment> out;
  std::unordered_set<std::string> seen;
  auto add = [&](AnnotatedSegment seg) {
    if (seen.insert(seg.grid.tiles()).second) out.push_back(std::move(seg));
  };
  for (const AnnotatedSegment& room : rooms) {
    if (room.game != GameId::Zelda) {
      throw PreconditionError("flip augmentation applies to Zelda rooms only");
    }
    add(room);
    if (room.provenance.find('#') != std::string::npos) continue;
    add({room.grid.flipped_horizontal(), flip_label_horizontal(room.label), room.game,
         room.provenance + "#h"});
    add({room.grid.flipped_vertical(), flip_label_vertical(room.label), room.game,
         room.provenance + "#v"});
  }
  return out;
}

TileGrid pad_zelda_room(const TileGrid& room) {
  if (room.rows() != 11 || room.cols() != 16) {
    throw ShapeError("padding expects an 11x16 room, got " + std::to_string(room.rows()) + "x" +
                     std::to_string(room.cols()));
  }
  const std::size_t cols = room.cols();
  std::string tiles;
  tiles.reserve(15 * cols);
  tiles.append(room.tiles(), 0, 2 * cols);
  tiles.append(room.tiles());
  tiles.append(room.tiles(), 9 * cols, 2 * cols);
  return TileGrid(15, cols, std::move(tiles));
}

std::size_t Corpus::segment_rows() const { return segments.empty() ? 0 : segments.front().grid.rows(); }
std::size_t Corpus::segment_cols() const { return segments.empty() ? 0 : segments.front().grid.cols(); }

std::string vocabulary_of(std::span<const AnnotatedSegment> segments) {
  std::array<bool, 256> present{};
  for (const AnnotatedSegment& seg : segments) {
    for (char t : seg.grid.tiles()) present[static_cast<unsigned char>(t)] = true;
  }
  std::string vocab;
  for (int c = 0; c < 256; ++c) {
    if (present[c]) vocab.push_back(static_cast<char>(c));
  }
  return vocab;
}

Corpus make_corpus(std::vector<AnnotatedSegment> segments) {
  Corpus corpus;
  std::unordered_set<std::string> provenance;
  std::set<GameId> games;
  for (const AnnotatedSegment& seg : segments) {
    if (!provenance.insert(seg.provenance).second) {
      throw AnnotationError("duplicate segment provenance '" + seg.provenance + "'");
    }
    games.insert(seg.game);
  }
  corpus.games.assign(games.begin(), games.end());
  corpus.vocabulary = vocabulary_of(segments);
  corpus.segments = std::move(segments);
  return corpus;
}

std::set<unsigned> unique_label_indices(const Corpus& corpus) {
  std::set<unsigned> out;
  for (const AnnotatedSegment& seg : corpus.segments) out.insert(seg.label.index());
  return out;
}

// Container layout:
//   segblend-corpus 1
//   games <name>...
//   vocabulary <chars>
//   segments <count>
//   segment <game> <provenance> <rows> <cols> <U> <D> <L> <R>
//   <rows lines of tiles>
std::string format_corpus(const Corpus& corpus) {
  std::ostringstream out;
  out << "segblend-corpus 1\n";
  out << "games";
  for (GameId g : corpus.games) out << ' ' << to_string(g);
  out << "\nvocabulary " << corpus.vocabulary << "\n";
  out << "segments " << corpus.segments.size() << "\n";
  for (const AnnotatedSegment& seg : corpus.segments) {
    const auto bits = seg.label.bits();
    out << "segment " << to_string(seg.game) << ' ' << seg.provenance << ' ' << seg.grid.rows()
        << ' ' << seg.grid.cols() << ' ' << int(bits[0]) << ' ' << int(bits[1]) << ' '
        << int(bits[2]) << ' ' << int(bits[3]) << "\n";
    out << seg.grid.to_text() << "\n";
  }
  return out.str();
}

Corpus parse_corpus(std::string_view text) {
  std::vector<std::string_view> lines = split_lines(text);
  std::size_t pos = 0;
  auto next = [&](const char* what) -> std::string_view {
    if (pos >= lines.size()) throw FormatError(std::string("corpus truncated before ") + what);
    return lines[pos++];
  };
  auto fields_of = [](std::string_view line) {
    std::istringstream in{std::string(line)};
    std::vector<std::string> fields;
    for (std::string f; in >> f;) fields.push_back(f);
    return fields;
  };

  if (next("header") != "segblend-corpus 1") throw FormatError("not a segblend corpus (bad header)");
  auto games_line = fields_of(next("games line"));
  if (games_line.empty() || games_line[0] != "games") throw FormatError("corpus: expected 'games'");
  std::string_view vocab_line = next("vocabulary line");
  if (vocab_line.substr(0, 10) != "vocabulary") throw FormatError("corpus: expected 'vocabulary'");
  std::string vocabulary(vocab_line.size() > 11 ? vocab_line.substr(11) : std::string_view{});
  auto count_line = fields_of(next("segment count"));
  if (count_line.size() != 2 || count_line[0] != "segments") {
    throw FormatError("corpus: expected 'segments <count>'");
  }
  std::size_t count = 0;
  try {
    count = std::stoul(count_line[1]);
  } catch (const std::exception&) {
    throw FormatError("corpus: bad segment count");
  }

  std::vector<AnnotatedSegment> segments;
  segments.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t header_line = pos + 1;
    auto f = fields_of(next("segment header"));
    if (f.empty() || f[0] != "segment") {
      throw FormatError("corpus line " + std::to_string(header_line) + ": expected 'segment'");
    }
    if (f.size() != 9) {
      throw AnnotationError("corpus line " + std::to_string(header_line) +
                            ": segment record needs game, provenance, shape and 4 label bits, got " +
                            std::to_string(f.size() > 5 ? f.size() - 5 : 0) + " label fields");
    }
    AnnotatedSegment seg;
    seg.game = parse_game(f[1]);
    seg.provenance = f[2];
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::array<int, 4> bits{};
    try {
      rows = std::stoul(f[3]);
      cols = std::stoul(f[4]);
      for (int b = 0; b < 4; ++b) bits[b] = std::stoi(f[5 + b]);
    } catch (const std::exception&) {
      throw AnnotationError("corpus line " + std::to_string(header_line) + ": non-numeric field");
    }
    seg.label = DirectionalLabel::from_bits(bits);
    std::string tiles;
    tiles.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      std::string_view row = next("segment rows");
      if (row.size() != cols) {
        throw FormatError("corpus line " + std::to_string(pos) + ": expected " +
                          std::to_string(cols) + " tiles");
      }
      tiles.append(row);
    }
    seg.grid = TileGrid(rows, cols, std::move(tiles));
    segments.push_back(std::move(seg));
  }
  while (pos < lines.size()) {
    if (!lines[pos++].empty()) throw FormatError("corpus has trailing content");
  }

  Corpus corpus = make_corpus(std::move(segments));
  if (corpus.vocabulary != vocabulary) {
    throw FormatError("corpus vocabulary line does not match its segments");
  }
  std::vector<GameId> declared;
  for (std::size_t i = 1; i < games_line.size(); ++i) declared.push_back(parse_game(games_line[i]));
  if (declared != corpus.games) throw FormatError("corpus games line does not match its segments");
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, format_corpus(corpus));
}

Corpus load_corpus(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("corpus file not found: " + path.string());
  try {
    return parse_corpus(read_file(path));
  } catch (const AnnotationError& e) {
    throw AnnotationError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::map<std::string, DirectionalLabel> parse_annotations(std::string_view text) {
  std::map<std::string, DirectionalLabel> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::istringstream in{std::string(lines[i])};
    std::vector<std::string> fields;
    for (std::string f; in >> f;) fields.push_back(f);
    // Whole-line comments only: provenance keys may contain '#'.
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() != 5) {
      throw AnnotationError("annotation line " + std::to_string(i + 1) +
                            ": expected '<provenance> U D L R'");
    }
    std::array<int, 4> bits{};
    for (int b = 0; b < 4; ++b) {
      if (fields[1 + b] != "0" && fields[1 + b] != "1") {
        throw AnnotationError("annotation line " + std::to_string(i + 1) + ": bits must be 0/1");
      }
      bits[b] = fields[1 + b] == "1";
    }
    if (!out.emplace(fields[0], DirectionalLabel::from_bits(bits)).second) {
      throw AnnotationError("annotation line " + std::to_string(i + 1) + ": duplicate key " + fields[0]);
    }
  }
  return out;
}

std::map<std::string, DirectionalLabel> load_annotations(const std::filesystem::path& path) {
  try {
    return parse_annotations(read_file(path));
  } catch (const AnnotationError& e) {
    throw AnnotationError(path.string() + ": " + e.what());
  }
}

std::size_t apply_annotations(std::vector<AnnotatedSegment>& segments,
                              const std::map<std::string, DirectionalLabel>& annotations) {
  std::size_t applied = 0;
  for (AnnotatedSegment& seg : segments) {
    if (auto it = annotations.find(seg.provenance); it != annotations.end()) {
      seg.label = it->second;
      ++applied;
    }
  }
  if (applied != annotations.size()) {
    for (const auto& [key, label] : annotations) {
      const bool known = std::any_of(segments.begin(), segments.end(),
                                     [&](const AnnotatedSegment& s) { return s.provenance == key; });
      if (!known) throw AnnotationError("annotation for unknown segment '" + key + "'");
    }
  }
  return applied;
}

Corpus ingest_levels(std::span<const std::filesystem::path> inputs, const GameSpec& game,
                     const IngestOptions& options) {
  std::vector<std::filesystem::path> files;
  for (const auto& input : inputs) {
    if (std::filesystem::is_directory(input)) {
      std::vector<std::filesystem::path> found;
      for (const auto& entry : std::filesystem::directory_iterator(input)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(input);
    }
  }
  if (files.empty()) throw IoError("no level files to ingest");

  std::vector<AnnotatedSegment> segments;
  for (const auto& file : files) {
    const std::string where = file.string();
    try {
      TileGrid level = parse_level(read_file(file), game);
      auto extracted = extract_segments(level, game, file.stem().string());
      segments.insert(segments.end(), std::make_move_iterator(extracted.begin()),
                      std::make_move_iterator(extracted.end()));
    } catch (const VocabularyError& e) {
      throw VocabularyError(where + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    } catch (const ExtractionError& e) {
      throw ExtractionError(where + ": " + e.what());
    }
  }

  if (game.id == GameId::Metroid || game.id == GameId::MegaMan) {
    for (AnnotatedSegment& seg : segments) seg.label = auto_label_openings(seg.grid, game, options.min_run);
    if (options.annotations) apply_annotations(segments, load_annotations(*options.annotations));
  } else if (options.annotations) {
    apply_annotations(segments, load_annotations(*options.annotations));
  }

  if (game.id == GameId::Zelda) {
    if (options.augment_flips) segments = augment_zelda_flips(segments);
    if (options.pad_to_blend_height) {
      for (AnnotatedSegment& seg : segments) seg.grid = pad_zelda_room(seg.grid);
    }
  }
  return make_corpus(std::move(segments));
}

}  // namespace segblend

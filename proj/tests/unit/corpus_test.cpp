#include "segblend/corpus.hpp"
#include "segblend/errors.hpp"
#include "segblend/game_config.hpp"
#include "segblend/tiles.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>

namespace sb = segblend;
using sb::test::games;

TEST(Tiles, GameNames) {
  EXPECT_EQ(sb::parse_game("zelda"), sb::GameId::Zelda);
  EXPECT_EQ(sb::parse_game("mm"), sb::GameId::MegaMan);
  EXPECT_EQ(sb::parse_game("lr"), sb::GameId::LodeRunner);
  EXPECT_EQ(sb::to_string(sb::GameId::Metroid), "metroid");
  EXPECT_THROW(sb::parse_game("tetris"), sb::Error);
}

TEST(Tiles, DirectionalLabelIndexing) {
  const auto l = sb::DirectionalLabel::from_index(9);
  EXPECT_TRUE(l.up);
  EXPECT_FALSE(l.down);
  EXPECT_FALSE(l.left);
  EXPECT_TRUE(l.right);
  EXPECT_EQ(l.to_string(), "1,0,0,1");
  EXPECT_EQ(l.open_count(), 2u);
  const auto all = sb::all_directional_labels();
  for (unsigned i = 0; i < 16; ++i) EXPECT_EQ(all[i].index(), i);
  EXPECT_EQ(sb::opposite(sb::Side::Left), sb::Side::Right);
}

TEST(Tiles, FlipsAreInvolutions) {
  const sb::TileGrid g(2, 3, "abcdef");
  EXPECT_EQ(g.flipped_horizontal().tiles(), "cbafed");
  EXPECT_EQ(g.flipped_vertical().tiles(), "defabc");
  EXPECT_EQ(g.flipped_horizontal().flipped_horizontal(), g);
  EXPECT_EQ(g.crop(0, 1, 2, 2).tiles(), "bcef");
  EXPECT_EQ(g.to_text(), "abc\ndef");
}

TEST(Corpus, ParseLevelRejectsRaggedAndUnknownTiles) {
  const auto& z = games().game(sb::GameId::Zelda);
  EXPECT_THROW(sb::parse_level("WWW\nWW\n", z), sb::FormatError);
  EXPECT_THROW(sb::parse_level("", z), sb::FormatError);
  try {
    sb::parse_level("WWW\nWqW\n", z);
    FAIL();
  } catch (const sb::VocabularyError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
  const auto g = sb::parse_level("WW\r\nFF\r\n\n\n", z);
  EXPECT_EQ(g.rows(), 2u);
  EXPECT_EQ(g.cols(), 2u);
}

TEST(Corpus, ZeldaRoomLabelsFollowDoors) {
  const auto& z = games().game(sb::GameId::Zelda);
  const auto label = sb::derive_zelda_label(sb::test::zelda_room(true, false, false, true), z);
  EXPECT_EQ(label.to_string(), "1,0,0,1");
  EXPECT_EQ(sb::derive_zelda_label(sb::test::zelda_room(false, false, false, false), z).index(), 0u);
  EXPECT_EQ(sb::derive_zelda_label(sb::test::zelda_room(true, true, true, true), z).index(), 15u);
}

TEST(Corpus, ZeldaExtractionSkipsVoidRooms) {
  const auto& z = games().game(sb::GameId::Zelda);
  sb::TileGrid level(11, 32, '-');
  const auto room = sb::test::zelda_room(false, false, true, false);
  for (std::size_t r = 0; r < 11; ++r) {
    for (std::size_t c = 0; c < 16; ++c) level.set(r, c + 16, room.at(r, c));
  }
  const auto segs = sb::extract_segments(level, z, "d1");
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].provenance, "d1@0,16");
  EXPECT_EQ(segs[0].label.to_string(), "0,0,1,0");
  EXPECT_THROW(sb::extract_segments(sb::TileGrid(12, 16, 'W'), z, "bad"), sb::ExtractionError);
}

// Screens made only of filler or block tiles are not playable space.
TEST(Corpus, PlatformerExtractionSkipsFillerAndBlockScreens) {
  for (sb::GameId id : {sb::GameId::Metroid, sb::GameId::MegaMan}) {
    const auto& g = games().game(id);
    sb::TileGrid level(15, 48, '-');
    for (std::size_t r = 0; r < 15; ++r) {
      for (std::size_t c = 0; c < 16; ++c) level.set(r, c, '@');
      for (std::size_t c = 16; c < 32; ++c) level.set(r, c, (r + c) % 2 ? '#' : '@');
    }
    const auto segs = sb::extract_segments(level, g, "s1");
    ASSERT_EQ(segs.size(), 1u) << sb::to_string(id);
    EXPECT_EQ(segs[0].provenance, "s1@0,32");
  }
}

TEST(Corpus, FlipAugmentationMirrorsLabelsAndIsIdempotent) {
  const auto& z = games().game(sb::GameId::Zelda);
  const auto room = sb::test::zelda_room(true, false, true, false);
  std::vector<sb::AnnotatedSegment> rooms{{room, sb::derive_zelda_label(room, z), sb::GameId::Zelda, "d@0,0"}};
  const auto once = sb::augment_zelda_flips(rooms);
  ASSERT_EQ(once.size(), 3u);
  EXPECT_EQ(once[1].label.to_string(), "1,0,0,1");
  EXPECT_EQ(once[2].label.to_string(), "0,1,1,0");
  for (const auto& s : once) EXPECT_EQ(sb::derive_zelda_label(s.grid, z), s.label);
  EXPECT_EQ(sb::augment_zelda_flips(once), once);

  // A symmetric room adds no duplicates.
  const auto sym = sb::test::zelda_room(false, false, false, false);
  std::vector<sb::AnnotatedSegment> s{{sym, {}, sb::GameId::Zelda, "s@0,0"}};
  EXPECT_EQ(sb::augment_zelda_flips(s).size(), 1u);
}

TEST(Corpus, PaddingRepeatsWallRows) {
  const auto room = sb::test::zelda_room(true, true, false, false);
  const auto padded = sb::pad_zelda_room(room);
  EXPECT_EQ(padded.rows(), 15u);
  EXPECT_EQ(padded.cols(), 16u);
  EXPECT_EQ(padded.row(0), room.row(0));
  EXPECT_EQ(padded.row(1), room.row(1));
  EXPECT_EQ(padded.row(2), room.row(0));
  EXPECT_EQ(padded.row(12), room.row(10));
  EXPECT_EQ(padded.row(13), room.row(9));
  EXPECT_EQ(padded.row(14), room.row(10));
  EXPECT_EQ(sb::derive_zelda_label(padded, games().game(sb::GameId::Zelda)).to_string(), "1,1,0,0");
  EXPECT_THROW(sb::pad_zelda_room(padded), sb::ShapeError);
}

TEST(Corpus, AutoLabelNeedsAPassableRun) {
  const auto& mm = games().game(sb::GameId::MegaMan);
  sb::TileGrid s(15, 16, '#');
  for (std::size_t r = 1; r < 14; ++r) {
    for (std::size_t c = 1; c < 15; ++c) s.set(r, c, '-');
  }
  s.set(7, 0, '-');
  EXPECT_EQ(sb::auto_label_openings(s, mm).index(), 0u);
  s.set(8, 0, '-');
  EXPECT_EQ(sb::auto_label_openings(s, mm).to_string(), "0,0,1,0");
  EXPECT_EQ(sb::auto_label_openings(s, mm, 3).index(), 0u);
  s.set(0, 5, '|');
  s.set(0, 6, '|');
  EXPECT_EQ(sb::auto_label_openings(s, mm).to_string(), "1,0,1,0");
}

TEST(Corpus, LodeRunnerQuadrantsOpenTowardEachOther) {
  const auto& lr = games().game(sb::GameId::LodeRunner);
  const auto segs = sb::extract_segments(sb::TileGrid(22, 32, '.'), lr, "Level 1");
  ASSERT_EQ(segs.size(), 4u);
  EXPECT_EQ(segs[0].label.to_string(), "0,1,0,1");
  EXPECT_EQ(segs[1].label.to_string(), "0,1,1,0");
  EXPECT_EQ(segs[2].label.to_string(), "1,0,0,1");
  EXPECT_EQ(segs[3].label.to_string(), "1,0,1,0");
  EXPECT_THROW(sb::extract_segments(sb::TileGrid(22, 30, '.'), lr, "x"), sb::ExtractionError);
}

TEST(Corpus, FormatRoundTrip) {
  const auto corpus = sb::test::fixture_corpus(sb::GameId::Zelda);
  const auto text = sb::format_corpus(corpus);
  EXPECT_EQ(sb::parse_corpus(text), corpus);
  EXPECT_EQ(sb::format_corpus(sb::parse_corpus(text)), text);
  EXPECT_THROW(sb::parse_corpus("not a corpus\n"), sb::FormatError);
  EXPECT_THROW(sb::parse_corpus(text.substr(0, text.size() / 2)), sb::FormatError);
}

TEST(Corpus, VocabularyIsSortedUnion) {
  std::vector<sb::AnnotatedSegment> segs{{sb::TileGrid(1, 3, "WFD"), {}, sb::GameId::Zelda, "a@0,0"},
                                         {sb::TileGrid(1, 3, "B-F"), {}, sb::GameId::Zelda, "b@0,0"}};
  EXPECT_EQ(sb::vocabulary_of(segs), "-BDFW");
  segs[1].provenance = "a@0,0";
  EXPECT_THROW(sb::make_corpus(segs), sb::AnnotationError);
}

TEST(Corpus, AnnotationsOverrideLabels) {
  const auto anns = sb::parse_annotations("# comment\nm@0,0 1 0 0 1\n");
  std::vector<sb::AnnotatedSegment> segs{{sb::TileGrid(1, 1, '-'), {}, sb::GameId::MegaMan, "m@0,0"}};
  EXPECT_EQ(sb::apply_annotations(segs, anns), 1u);
  EXPECT_EQ(segs[0].label.index(), 9u);
  EXPECT_THROW(sb::apply_annotations(segs, sb::parse_annotations("other@0,0 1 0 0 1\n")), sb::AnnotationError);
  EXPECT_THROW(sb::parse_annotations("m@0,0 1 0 2 1\n"), sb::AnnotationError);
}

TEST(Corpus, FixtureIngestIsDeterministic) {
  for (sb::GameId g : sb::kAllGames) {
    const auto a = sb::test::fixture_corpus(g);
    const auto b = sb::test::fixture_corpus(g);
    EXPECT_EQ(sb::format_corpus(a), sb::format_corpus(b));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a.games, std::vector<sb::GameId>{g});
    const auto& spec = games().game(g);
    EXPECT_EQ(a.segment_rows(), spec.segment_rows);
    for (char t : a.vocabulary) EXPECT_TRUE(spec.in_vocabulary(t)) << t;
  }
}

TEST(Corpus, FixtureLabelCoverage) {
  EXPECT_EQ(sb::unique_label_indices(sb::test::fixture_corpus(sb::GameId::Zelda)).size(), 16u);
  EXPECT_EQ(sb::unique_label_indices(sb::test::fixture_corpus(sb::GameId::LodeRunner)).size(), 4u);
}

TEST(Corpus, IngestPaddingAndNoFlips) {
  sb::IngestOptions opts;
  opts.augment_flips = false;
  const auto plain = sb::test::fixture_corpus(sb::GameId::Zelda, opts);
  opts.augment_flips = true;
  opts.pad_to_blend_height = true;
  const auto padded = sb::test::fixture_corpus(sb::GameId::Zelda, opts);
  EXPECT_LT(plain.size(), padded.size());
  EXPECT_EQ(padded.segment_rows(), 15u);
  for (const auto& s : plain.segments) EXPECT_EQ(s.provenance.find('#'), std::string::npos);
}

TEST(Corpus, IngestErrorsNameTheFile) {
  const auto dir = sb::test::scratch_dir("bad_ingest");
  std::ofstream(dir / "broken.txt") << "WWWW\nWWW\n";
  const std::vector<std::filesystem::path> inputs{dir};
  try {
    sb::ingest_levels(inputs, games().game(sb::GameId::Zelda));
    FAIL();
  } catch (const sb::Error& e) {
    EXPECT_NE(std::string(e.what()).find("broken.txt"), std::string::npos);
  }
}

TEST(GameConfig, BlendSolidSetNeedsAgreement) {
  const std::vector<sb::GameId> zm{sb::GameId::Zelda, sb::GameId::MegaMan};
  const auto solid = sb::blend_solid_set(games(), zm);
  // 'B' and 'D' are solid in both and '#' is only known to Mega Man. 'W' is
  // a Zelda wall but Mega Man ammo; 'M' is a Zelda monster.
  EXPECT_NE(solid.find('B'), std::string::npos);
  EXPECT_NE(solid.find('D'), std::string::npos);
  EXPECT_NE(solid.find('#'), std::string::npos);
  EXPECT_EQ(solid.find('W'), std::string::npos);
  EXPECT_EQ(solid.find('M'), std::string::npos);
  EXPECT_THROW(sb::GameConfig::parse("{}"), sb::ConfigError);
}

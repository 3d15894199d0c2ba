#include "segblend/assembler.hpp"
#include "segblend/errors.hpp"
#include "segblend/layout.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace sb = segblend;

namespace {

sb::CvaeModel tiny_model(sb::GameId game, std::size_t rows, std::size_t cols, std::uint64_t seed,
                         std::size_t games = 1) {
  sb::CvaeArchitecture a;
  a.rows = rows;
  a.cols = cols;
  a.vocabulary = "-DFW";
  a.latent_dim = 2;
  a.games = {game};
  if (games > 1) {
    a.games = {sb::GameId::Zelda, sb::GameId::LodeRunner};
    a.label_width = 4 + games;
  }
  a.hidden = {8};
  return sb::CvaeModel::initialize(a, seed);
}

}  // namespace

TEST(Layout, SingleStepMakesTwoLinkedCells) {
  sb::Rng rng(1);
  const auto layout = sb::generate_layout(1, 1, rng);
  ASSERT_EQ(layout.size(), 2u);
  EXPECT_EQ(layout.step_count, 1u);
  EXPECT_TRUE(sb::check_layout(layout).empty());
  for (const auto& [p, cell] : layout.cells) EXPECT_EQ(cell.sides.open_count(), 1u);
}

TEST(Layout, RejectsEmptyStepRanges) {
  sb::Rng rng(1);
  EXPECT_THROW(sb::generate_layout(0, 3, rng), sb::PreconditionError);
  EXPECT_THROW(sb::generate_layout(5, 3, rng), sb::PreconditionError);
}

TEST(Layout, SeededLayoutsAreValid) {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    sb::Rng rng(seed);
    const auto layout = sb::generate_layout(1, 20, rng);
    ASSERT_TRUE(sb::check_layout(layout).empty()) << "seed " << seed;
    ASSERT_LE(layout.size(), layout.step_count + 1) << "seed " << seed;
    ASSERT_GE(layout.step_count, 1u);
    ASSERT_LE(layout.step_count, 20u);
    ASSERT_TRUE(layout.contains({0, 0}));
    // Every step opens exactly one new pair of sides.
    std::size_t open = 0;
    for (const auto& [p, cell] : layout.cells) open += cell.sides.open_count();
    ASSERT_EQ(open, 2 * layout.step_count) << "seed " << seed;
  }
}

TEST(Layout, StepCountIsUniformOverTheRange) {
  sb::Rng rng(42);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 4000; ++i) counts[sb::generate_layout(3, 6, rng).step_count - 3]++;
  for (int c : counts) EXPECT_NEAR(c, 1000, 4 * std::sqrt(1000 * 0.75));
}

TEST(Layout, SameSeedSameLayout) {
  sb::Rng a(9), b(9);
  EXPECT_EQ(sb::generate_layout(4, 12, a), sb::generate_layout(4, 12, b));
}

TEST(Layout, CheckerReportsEachDefect) {
  sb::Layout l;
  l.cells[{0, 0}] = {{0, 0}, sb::DirectionalLabel{false, false, false, true}};
  EXPECT_EQ(sb::check_layout(l).size(), 1u);  // missing neighbour
  l.cells[{0, 1}] = {{0, 1}, {}};
  EXPECT_EQ(sb::check_layout(l).size(), 2u);  // not mirrored, disconnected
  l.cells[{0, 1}].sides.left = true;
  EXPECT_TRUE(sb::check_layout(l).empty());
  l.cells[{5, 5}] = {{5, 5}, {}};
  ASSERT_EQ(sb::check_layout(l).size(), 1u);
  EXPECT_NE(sb::check_layout(l)[0].find("disconnected"), std::string::npos);
}

TEST(Layout, TextRoundTrip) {
  sb::Rng rng(3);
  const auto layout = sb::generate_layout(5, 9, rng);
  const auto text = sb::format_layout(layout);
  EXPECT_EQ(sb::parse_layout(text), layout);
  EXPECT_THROW(sb::parse_layout("layout 1 2\n0 0 0 0 0 1\n"), sb::FormatError);
}

TEST(Layout, GameBitPolicies) {
  sb::Rng rng(1);
  EXPECT_EQ(sb::GameBitPolicy::fixed({1, 0}).draw(rng), (std::vector<std::uint8_t>{1, 0}));
  EXPECT_TRUE(sb::GameBitPolicy::none().draw(rng).empty());
  int ones = 0;
  const auto uniform = sb::GameBitPolicy::uniform(1);
  for (int i = 0; i < 4000; ++i) ones += uniform.draw(rng)[0];
  EXPECT_NEAR(ones, 2000, 4 * std::sqrt(1000.0));
  EXPECT_THROW((sb::GameBitPolicy{{1.5}}.draw(rng)), sb::PreconditionError);
}

TEST(Assembler, EveryCellIsGeneratedUnderItsOwnSides) {
  const auto model = tiny_model(sb::GameId::Zelda, 11, 16, 4);
  sb::Rng rng(5);
  const auto layout = sb::generate_layout(6, 12, rng);
  const auto level = sb::assemble(layout, model, sb::GameBitPolicy::none(), rng);
  ASSERT_EQ(level.placements.size(), layout.size());
  for (const auto& [p, pl] : level.placements) {
    EXPECT_EQ(pl.label.directional, layout.at(p).sides);
    EXPECT_EQ(pl.segment.label, layout.at(p).sides);
    // The recorded seed reproduces the cell.
    sb::Rng again(pl.latent_seed);
    EXPECT_EQ(model.generate(pl.label, again).grid, pl.segment.grid);
  }
  EXPECT_EQ(level.segment_rows(), 11u);
}

TEST(Assembler, BlendModelsTakeGameBitsFromThePolicy) {
  const auto model = tiny_model(sb::GameId::Zelda, 4, 4, 4, 2);
  sb::Rng rng(5);
  const auto layout = sb::generate_layout(6, 6, rng);
  const auto level = sb::assemble(layout, model, sb::GameBitPolicy::fixed({0, 1}), rng);
  for (const auto& [p, pl] : level.placements) {
    EXPECT_EQ(pl.label.game_bits, (std::vector<std::uint8_t>{0, 1}));
    EXPECT_EQ(pl.segment.game, sb::GameId::LodeRunner);
  }
  EXPECT_THROW(sb::assemble(layout, model, sb::GameBitPolicy::none(), rng), sb::ShapeError);
}

TEST(Assembler, SingleModelWithProbabilityOne) {
  const auto zelda = tiny_model(sb::GameId::Zelda, 11, 16, 1);
  const auto mm = tiny_model(sb::GameId::MegaMan, 15, 16, 2);
  const std::vector<const sb::CvaeModel*> models{&zelda, &mm};
  const std::vector<double> probs{0.0, 1.0};
  sb::Rng rng(8);
  const auto level = sb::assemble_multi(sb::generate_layout(5, 5, rng), models, probs, rng);
  for (const auto& [p, pl] : level.placements) {
    EXPECT_EQ(pl.model_index, 1u);
    EXPECT_EQ(pl.segment.game, sb::GameId::MegaMan);
    EXPECT_FALSE(pl.padded);
  }
}

TEST(Assembler, ZeldaRoomsArePaddedBesidePlatformers) {
  const auto zelda = tiny_model(sb::GameId::Zelda, 11, 16, 1);
  const auto mm = tiny_model(sb::GameId::MegaMan, 15, 16, 2);
  const std::vector<const sb::CvaeModel*> models{&zelda, &mm};
  const std::vector<double> probs{1.0, 0.0};
  sb::Rng rng(8);
  const auto level = sb::assemble_multi(sb::generate_layout(5, 5, rng), models, probs, rng);
  for (const auto& [p, pl] : level.placements) {
    EXPECT_TRUE(pl.padded);
    EXPECT_EQ(pl.segment.grid.rows(), 15u);
  }
}

TEST(Assembler, ModelChoiceFollowsTheProbabilities) {
  const auto a = tiny_model(sb::GameId::Metroid, 3, 3, 1);
  const auto b = tiny_model(sb::GameId::MegaMan, 3, 3, 2);
  const std::vector<const sb::CvaeModel*> models{&a, &b};
  const std::vector<double> probs{0.3, 0.7};
  sb::Rng rng(77);
  std::size_t cells = 0;
  std::size_t first = 0;
  for (int i = 0; i < 300; ++i) {
    const auto level = sb::assemble_multi(sb::generate_layout(6, 12, rng), models, probs, rng);
    for (const auto& [p, pl] : level.placements) {
      ++cells;
      first += pl.model_index == 0;
    }
  }
  const double n = static_cast<double>(cells);
  EXPECT_NEAR(static_cast<double>(first), 0.3 * n, 4 * std::sqrt(n * 0.21));
}

TEST(Assembler, RejectsBadProbabilitiesAndShapes) {
  const auto a = tiny_model(sb::GameId::Metroid, 3, 3, 1);
  const auto b = tiny_model(sb::GameId::MegaMan, 3, 4, 2);
  const auto c = tiny_model(sb::GameId::MegaMan, 5, 3, 2);
  sb::Rng rng(1);
  const auto layout = sb::generate_layout(2, 2, rng);
  const std::vector<const sb::CvaeModel*> ab{&a, &b};
  const std::vector<const sb::CvaeModel*> ac{&a, &c};
  const std::vector<const sb::CvaeModel*> aa{&a, &a};
  EXPECT_THROW(sb::assemble_multi(layout, aa, std::vector<double>{0.5, 0.6}, rng), sb::PreconditionError);
  EXPECT_THROW(sb::assemble_multi(layout, aa, std::vector<double>{1.5, -0.5}, rng), sb::PreconditionError);
  EXPECT_THROW(sb::assemble_multi(layout, aa, std::vector<double>{1.0}, rng), sb::PreconditionError);
  EXPECT_THROW(sb::assemble_multi(layout, ab, std::vector<double>{0.5, 0.5}, rng), sb::ShapeError);
  EXPECT_THROW(sb::assemble_multi(layout, ac, std::vector<double>{0.5, 0.5}, rng), sb::ShapeError);
}

TEST(Assembler, LevelFileRoundTrip) {
  const auto zelda = tiny_model(sb::GameId::Zelda, 11, 16, 1);
  const auto mm = tiny_model(sb::GameId::MegaMan, 15, 16, 2);
  const std::vector<const sb::CvaeModel*> models{&zelda, &mm};
  const std::vector<double> probs{0.5, 0.5};
  sb::Rng rng(8);
  const auto level = sb::assemble_multi(sb::generate_layout(5, 9, rng), models, probs, rng);
  const auto text = sb::format_level(level);
  const auto back = sb::parse_level_file(text);
  EXPECT_EQ(sb::format_level(back), text);
  EXPECT_EQ(back.layout, level.layout);
  for (const auto& [p, pl] : level.placements) {
    EXPECT_EQ(back.placements.at(p).segment.grid, pl.segment.grid);
    EXPECT_EQ(back.placements.at(p).padded, pl.padded);
  }
  EXPECT_THROW(sb::parse_level_file("layout 1 2\n"), sb::FormatError);
}

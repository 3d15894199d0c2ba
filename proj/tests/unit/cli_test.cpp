#include "commands.hpp"
#include "test_support.hpp"

#include <segblend/assembler.hpp>
#include <segblend/cvae.hpp>
#include <segblend/layout.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sb = segblend;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = sb::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string fixture(const char* game) { return (sb::test::fixtures_dir() / game).string(); }

// Sets an environment variable for one scope.
class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) { ::setenv(name, value, 1); }
  ~ScopedEnv() { ::unsetenv(name_); }

 private:
  const char* name_;
};

// Lode Runner corpus and a small trained model, built once.
struct Trained {
  fs::path dir;
  fs::path corpus;
  fs::path model;
};

const Trained& trained() {
  static const Trained t = [] {
    Trained r;
    r.dir = sb::test::scratch_dir("cli_shared");
    r.corpus = r.dir / "lr.corpus";
    r.model = r.dir / "lr.ckpt";
    const auto a = run({"ingest", fixture("loderunner"), "--game", "loderunner", "--out", r.corpus.string()});
    EXPECT_EQ(a.code, 0) << a.err;
    const auto b = run({"--seed", "3", "train", "--corpus", r.corpus.string(), "--epochs", "2", "--latent", "4",
                        "--quiet", "--out", r.model.string()});
    EXPECT_EQ(b.code, 0) << b.err;
    return r;
  }();
  return t;
}

}  // namespace

TEST(Cli, IngestReportsCounts) {
  const auto dir = sb::test::scratch_dir("cli_ingest");
  const auto r = run({"ingest", fixture("loderunner"), "--game", "loderunner", "--out", (dir / "c").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto corpus = sb::test::fixture_corpus(sb::GameId::LodeRunner);
  EXPECT_NE(r.out.find(std::to_string(corpus.size()) + " segments"), std::string::npos) << r.out;
  EXPECT_EQ(sb::load_corpus(dir / "c").size(), corpus.size());
}

TEST(Cli, IngestIsByteIdenticalAcrossRuns) {
  const auto dir = sb::test::scratch_dir("cli_ingest_twice");
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(run({"ingest", fixture("zelda"), "--game", "zelda", "--out", (dir / name).string()}).code, 0);
  }
  EXPECT_EQ(slurp(dir / "a"), slurp(dir / "b"));
}

TEST(Cli, BadCharacterIsAKindedError) {
  const auto dir = sb::test::scratch_dir("cli_badchar");
  std::string level;
  for (int r = 0; r < 15; ++r) level += std::string(r == 4 ? "....~..........." : "................") + "\n";
  spit(dir / "bad.txt", level);
  const auto r = run({"ingest", (dir / "bad.txt").string(), "--game", "loderunner", "--out", (dir / "c").string()});
  EXPECT_EQ(r.code, sb::cli::kFailure);
  EXPECT_EQ(r.err.rfind("segblend: error: kind=", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("bad.txt"), std::string::npos) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, sb::cli::kUsage);
  EXPECT_EQ(run({"train"}).code, sb::cli::kUsage);
  const auto r = run({"render", "--level", "x", "--out", "y", "--bogus"});
  EXPECT_EQ(r.code, sb::cli::kUsage);
  EXPECT_NE(r.err.find("kind=usage"), std::string::npos);
}

TEST(Cli, TrainWritesCheckpointAndLog) {
  const auto& t = trained();
  const auto model = sb::CvaeModel::load(t.model);
  EXPECT_EQ(model.latent_dim(), 4u);
  EXPECT_EQ(model.label_width(), 4u);
  std::istringstream log(slurp(t.model.string() + ".log.tsv"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(log, line)) lines += line.empty() || line[0] == '#' || line[0] == 'e' ? 0 : 1;
  EXPECT_EQ(lines, 2u);
}

TEST(Cli, TrainIsSeedDeterministic) {
  const auto& t = trained();
  const auto again = t.dir / "again.ckpt";
  ASSERT_EQ(run({"--seed", "3", "train", "--corpus", t.corpus.string(), "--epochs", "2", "--latent", "4", "--quiet",
                 "--out", again.string()})
                .code,
            0);
  EXPECT_EQ(slurp(t.model), slurp(again));
}

TEST(Cli, TrainRejectsMismatchedBlendShapes) {
  const auto dir = sb::test::scratch_dir("cli_mismatch");
  ASSERT_EQ(run({"ingest", fixture("metroid"), "--game", "metroid", "--out", (dir / "z").string()}).code, 0);
  const auto r = run({"train", "--corpus", (dir / "z").string(), "--corpus", trained().corpus.string(), "--epochs",
                      "1", "--quiet", "--out", (dir / "m").string()});
  EXPECT_EQ(r.code, sb::cli::kFailure);
  EXPECT_NE(r.err.find("kind="), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "m"));
}

TEST(Cli, GenerateRejectsWrongLabelWidth) {
  const auto r = run({"generate", "--model", trained().model.string(), "--label", "1,0,0,1,1"});
  EXPECT_EQ(r.code, sb::cli::kFailure);
  EXPECT_NE(r.err.find("kind=shape"), std::string::npos) << r.err;
}

TEST(Cli, GeneratePrintsSegments) {
  const auto r = run({"--seed", "1", "generate", "--model", trained().model.string(), "--label", "1,1,0,0",
                      "--count", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("segment 0 label 1,1,0,0"), std::string::npos);
  EXPECT_NE(r.out.find("segment 1 label 1,1,0,0"), std::string::npos);
}

TEST(Cli, LayoutRespectsStepBounds) {
  const auto r = run({"--seed", "2", "layout", "--steps-min", "3", "--steps-max", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto layout = sb::parse_layout(r.out);
  EXPECT_EQ(layout.step_count, 3u);
}

TEST(Cli, AssembleAndRender) {
  const auto& t = trained();
  const auto dir = sb::test::scratch_dir("cli_assemble");
  const auto level = dir / "level.txt";
  const auto a = run({"--seed", "4", "assemble", "--model", t.model.string(), "--model", t.model.string(), "--probs",
                      "1.0,0.0", "--steps-min", "2", "--steps-max", "4", "--out", level.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto parsed = sb::parse_level_file(slurp(level));
  EXPECT_FALSE(parsed.placements.empty());

  ASSERT_EQ(run({"render", "--level", level.string(), "--out", (dir / "level.render.txt").string()}).code, 0);
  EXPECT_FALSE(slurp(dir / "level.render.txt").empty());
  const auto png = run({"render", "--level", level.string(), "--out", (dir / "level.png").string()});
  ASSERT_EQ(png.code, 0) << png.err;
  EXPECT_EQ(slurp(dir / "level.png").substr(1, 3), "PNG");
}

TEST(Cli, AssembleRejectsBadProbabilities) {
  const auto dir = sb::test::scratch_dir("cli_badprobs");
  const auto r = run({"assemble", "--model", trained().model.string(), "--probs", "0.2,0.2", "--out",
                      (dir / "l").string()});
  EXPECT_EQ(r.code, sb::cli::kFailure);
}

TEST(Cli, EvaluateWritesReport) {
  const auto& t = trained();
  const auto dir = sb::test::scratch_dir("cli_evaluate");
  ASSERT_EQ(run({"ingest", fixture("zelda"), "--game", "zelda", "--out", (dir / "m").string()}).code, 0);
  const auto r = run({"evaluate", "--corpus", t.corpus.string(), "--corpus", (dir / "m").string(), "--latent", "2",
                      "--epochs", "1", "--latents", "2", "--blend-latents", "2", "--folds", "2", "--trees", "3",
                      "--blend", "zelda,loderunner", "--quiet", "--out", (dir / "report").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"table1_directional.tsv", "table2_blends.tsv", "table4_density_symmetry.tsv",
                           "table5_novelty.tsv", "edistance.tsv", "summary.md"}) {
    EXPECT_TRUE(fs::exists(dir / "report" / name)) << name;
  }
}

TEST(Cli, ConfigEnvironmentAndFlagsLayer) {
  const auto dir = sb::test::scratch_dir("cli_layers");
  spit(dir / "c.toml", "seed = 11\n[layout]\nsteps-min = 2\nsteps-max = 2\n");
  const std::string cfg = (dir / "c.toml").string();

  const auto from_file = run({"--config", cfg, "layout"});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(sb::parse_layout(from_file.out).step_count, 2u);
  // The seed comes from the file too.
  EXPECT_EQ(from_file.out, run({"--seed", "11", "layout", "--steps-min", "2", "--steps-max", "2"}).out);

  {
    ScopedEnv env("SEGBLEND_STEPS_MAX", "5");
    ScopedEnv env_min("SEGBLEND_STEPS_MIN", "5");
    const auto from_env = run({"--config", cfg, "layout"});
    ASSERT_EQ(from_env.code, 0) << from_env.err;
    EXPECT_EQ(sb::parse_layout(from_env.out).step_count, 5u);

    const auto from_flags = run({"--config", cfg, "layout", "--steps-min", "4", "--steps-max", "4"});
    ASSERT_EQ(from_flags.code, 0) << from_flags.err;
    EXPECT_EQ(sb::parse_layout(from_flags.out).step_count, 4u);
  }
}

TEST(Cli, ConfigFillsRequiredOptions) {
  const auto dir = sb::test::scratch_dir("cli_cfg_required");
  spit(dir / "c.toml", "[ingest]\ngame = \"loderunner\"\nout = \"" + (dir / "c").string() + "\"\n");
  const auto r = run({"--config", (dir / "c.toml").string(), "ingest", fixture("loderunner")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "c"));
}

TEST(Cli, ConfigUnknownKeyIsAnError) {
  const auto dir = sb::test::scratch_dir("cli_cfg_unknown");
  spit(dir / "c.toml", "[layout]\nsteps = 3\n");
  const auto r = run({"--config", (dir / "c.toml").string(), "layout"});
  EXPECT_EQ(r.code, sb::cli::kFailure);
  EXPECT_NE(r.err.find("kind=config"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("steps"), std::string::npos) << r.err;
}

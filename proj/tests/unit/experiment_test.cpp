#include "lexsmt/experiment.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "lexsmt/error.hpp"
#include "temp_dir.hpp"

using namespace lexsmt;
using testing_support::fixture;
using testing_support::TempDir;

namespace {

std::size_t count_lines(const std::string& text, std::string_view prefix) {
  std::size_t n = 0;
  for (const auto& line : split_fields(text, '\n')) {
    if (line.rfind(prefix, 0) == 0) ++n;
  }
  return n;
}

std::vector<RunRow> fake_rows(const std::string& direction) {
  std::vector<RunRow> rows;
  const auto& names = ladder_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (bool tuning : {false, true}) {
      RunRow row;
      row.direction = direction;
      row.config = names[i];
      row.tuning = tuning;
      row.bleu = 20.0 + 3.0 * static_cast<double>(i) + (tuning ? 1.0 : 0.0);
      row.test_tokens = 100;
      row.oov_tokens = 30 - 5 * i;
      row.run_id = "run" + std::to_string(i) + (tuning ? "on" : "off");
      rows.push_back(row);
    }
  }
  return rows;
}

ExperimentConfig fixture_config(std::string_view ladder) {
  MatrixConfig matrix = MatrixConfig::load(fixture("matrix.conf"));
  ExperimentConfig config = matrix.base;
  config.stages = ladder_stages(ladder);
  return config;
}

}  // namespace

TEST(Ladder, NamesAndStagesAgree) {
  const auto& names = ladder_names();
  ASSERT_EQ(names.size(), 6u);
  EXPECT_TRUE(ladder_stages("uncleaned") == std::vector<Stage>{Stage::baseline});
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_EQ(ladder_stages(names[i]).size(), i + 1);
    EXPECT_EQ(ladder_name(ladder_stages(names[i])), names[i]);
  }
  EXPECT_THROW(ladder_name({}), ConfigError);
  EXPECT_THROW(ladder_name({Stage::baseline, Stage::suffix_split}), ConfigError);
  EXPECT_THROW(ladder_stages("everything"), ConfigError);
  EXPECT_EQ(parse_stage(to_string(Stage::add_synsets)), Stage::add_synsets);
}

TEST(Direction, ParseAndReverse) {
  Direction d = Direction::parse("mr-hi");
  EXPECT_EQ(d.str(), "mr-hi");
  EXPECT_EQ(d.reversed().str(), "hi-mr");
  EXPECT_THROW(Direction::parse("mrhi"), ConfigError);
}

TEST(Matrix, FixtureExpandsToTwentyFourRuns) {
  MatrixConfig matrix = MatrixConfig::load(fixture("matrix.conf"));
  EXPECT_TRUE(matrix.assert_ladder);
  EXPECT_EQ(matrix.base.seed, 2018u);
  auto runs = matrix.expand();
  ASSERT_EQ(runs.size(), 24u);
  EXPECT_EQ(runs[0].direction.str(), "mr-hi");
  EXPECT_FALSE(runs[0].tuning);
  EXPECT_TRUE(runs[1].tuning);
  EXPECT_EQ(runs[23].direction.str(), "hi-mr");
  EXPECT_EQ(runs[23].name(), "verb_phrases");
  std::vector<std::string> hashes;
  for (const auto& r : runs) hashes.push_back(r.hash());
  std::sort(hashes.begin(), hashes.end());
  EXPECT_EQ(std::unique(hashes.begin(), hashes.end()), hashes.end());
}

TEST(Matrix, ParseErrors) {
  EXPECT_THROW(MatrixConfig::parse("bogus_key = 1\n", "."), ConfigError);
  EXPECT_THROW(MatrixConfig::parse("beam\n", "."), ConfigError);
  EXPECT_THROW(MatrixConfig::parse("beam = many\n", "."), ConfigError);
  EXPECT_THROW(MatrixConfig::parse("configs = cleaned, fancy\n", "."), ConfigError);
  MatrixConfig m = MatrixConfig::parse("# comment\nbeam = 7\ntuning = off\njobs = 2\n", "/data");
  EXPECT_EQ(m.base.params.decoder.beam, 7u);
  EXPECT_EQ(m.tuning, std::vector<bool>{false});
  EXPECT_EQ(m.jobs, 2u);
}

TEST(Experiment, HashDependsOnSettings) {
  ExperimentConfig a = fixture_config("cleaned");
  ExperimentConfig b = a;
  EXPECT_EQ(a.hash(), b.hash());
  b.params.decoder.beam = 50;
  EXPECT_NE(a.hash(), b.hash());
  b = a;
  b.tuning = true;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Experiment, EmptyStageListIsAConfigError) {
  TempDir dir;
  ExperimentConfig config = fixture_config("uncleaned");
  config.stages.clear();
  EXPECT_THROW(run_pipeline(config, dir.path()), ConfigError);
}

TEST(Experiment, MissingResourceFailsBeforeTraining) {
  TempDir dir;
  ExperimentConfig config = fixture_config("wordnet");
  config.paths.synsets = dir / "no_such_file.tsv";
  EXPECT_THROW(run_pipeline(config, dir / "out"), ConfigError);
  EXPECT_FALSE(std::filesystem::exists(dir / "out/runs"));
}

TEST(Experiment, UncleanedSmokeRun) {
  TempDir dir;
  ExperimentConfig config = fixture_config("uncleaned");
  RunOutcome outcome = run_pipeline(config, dir.path());
  const RunRow& row = outcome.row;
  EXPECT_EQ(row.config, "uncleaned");
  EXPECT_EQ(row.direction, "mr-hi");
  EXPECT_GT(row.bleu, 0.0);
  EXPECT_GT(row.test_tokens, 0u);
  EXPECT_EQ(row.run_id, config.hash());
  const auto run_dir = dir / ("runs/" + config.hash());
  for (const char* name : {"config.txt", "phrase_table.txt", "lm.txt", "alignments.txt",
                           "weights.txt", "test.hyp", "scores.tsv"}) {
    EXPECT_TRUE(std::filesystem::exists(run_dir / name)) << name;
  }
  // Same config, same bytes.
  TempDir again;
  RunOutcome second = run_pipeline(config, again.path());
  EXPECT_EQ(read_file(again / ("runs/" + config.hash() + "/scores.tsv")),
            read_file(run_dir / "scores.tsv"));
  EXPECT_EQ(second.row.phrase_table_hash, row.phrase_table_hash);
}

TEST(Oov, CountsWordsMissingFromTheTable) {
  PhraseTable table;
  PhraseEntry e;
  e.target = {"x"};
  e.scores = {1, 1, 1, 1};
  table.add({"a", "b"}, e);
  EXPECT_EQ(count_oov({{"a", "c"}, {"b", "b", "d"}}, table), 2u);
}

TEST(Synonyms, SiblingsShareASource) {
  ResourceSet res;
  res.add({{"s"}, {"x"}, Category::synset});
  res.add({{"s"}, {"y"}, Category::synset});
  res.add({{"t"}, {"z"}, Category::synset});
  ResourceSet sib = sibling_synonyms(res);
  SynonymIndex index(sib);
  EXPECT_TRUE(index.synonyms("x", "y"));
  EXPECT_FALSE(index.synonyms("x", "z"));
}

TEST(Report, TwelveRowsPerDirection) {
  TempDir dir;
  std::vector<RunRow> rows = fake_rows("mr-hi");
  const std::string md = report_markdown(rows);
  EXPECT_EQ(count_lines(md, "| "), 13u);
  EXPECT_EQ(count_lines(md, "|---"), 1u);
  const std::string csv = report_csv(rows);
  EXPECT_EQ(split_fields(csv, '\n').size(), 14u);  // header, 12 rows, trailing empty
  emit_report(rows, dir.path());
  const auto series = read_lines(dir / "series/mr-hi.bleu.tsv");
  ASSERT_EQ(series.size(), 7u);
  EXPECT_EQ(series[0], "index\tconfig\twithout_tuning\twith_tuning");
  EXPECT_EQ(series[1], "1\tuncleaned\t20\t21");
  EXPECT_EQ(series[6], "6\tverb_phrases\t35\t36");
  EXPECT_TRUE(std::filesystem::exists(dir / "series/mr-hi.oov.tsv"));
}

TEST(Report, LadderCheck) {
  std::vector<RunRow> rows = fake_rows("hi-mr");
  EXPECT_NO_THROW(check_ladder(rows));
  rows[10].oov_tokens = 99;
  EXPECT_THROW(check_ladder(rows), LadderError);
}

TEST(Report, SubjectiveColumnsAppearWhenRated) {
  std::vector<RunRow> rows = fake_rows("mr-hi");
  rows[11].subjective = SubjectiveSummary{90.0, 90.35};
  const std::string md = report_markdown(rows);
  EXPECT_NE(md.find("90.35%"), std::string::npos);
  EXPECT_NE(report_csv(rows).find("adequacy,fluency"), std::string::npos);
}

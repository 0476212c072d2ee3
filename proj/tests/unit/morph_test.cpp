#include "lexsmt/morph.hpp"

#include <gtest/gtest.h>

#include "lexsmt/error.hpp"
#include "temp_dir.hpp"

using namespace lexsmt;
using testing_support::fixture;
using testing_support::TempDir;

TEST(Split, SingleSuffixRule) {
  SuffixTable table({{"ी", {"ई"}, 1}}, {});
  EXPECT_EQ(table.split_token("नगरी"), (Tokens{"नगर", "ई"}));
}

TEST(Split, LongestSuffixWins) {
  SuffixTable table({{"ांमध्ये", {"मध्ये"}, 1}, {"ंमध्ये", {"मध्य"}, 1}}, {});
  EXPECT_EQ(table.split_token("ग्रंथांमध्ये"), (Tokens{"ग्रंथ", "मध्ये"}));
}

TEST(Split, NoMatchPassesThrough) {
  SuffixTable table = SuffixTable::load(fixture("rules.tsv"));
  EXPECT_EQ(table.split_token("सात"), Tokens{"सात"});
}

TEST(Split, MinStemLengthGuards) {
  SuffixTable table({{"ात", {"त"}, 2}}, {});
  EXPECT_EQ(table.split_token("रूपात"), (Tokens{"रूप", "त"}));
  EXPECT_EQ(table.split_token("हात"), Tokens{"हात"});
}

TEST(Split, ExactRuleBeatsSuffix) {
  SuffixTable table({{"त", {"ता"}, 1}}, {{"आहेत", {"अस"}}});
  EXPECT_EQ(table.split_token("आहेत"), Tokens{"अस"});
  EXPECT_EQ(table.split_token("जात"), (Tokens{"जा", "ता"}));
}

TEST(Split, WorkedSentenceUnderShippedRules) {
  SuffixTable table = SuffixTable::load(fixture("rules.tsv"));
  const auto input = read_sentences(fixture("worked/split_example.mr"));
  const auto expected = read_sentences(fixture("worked/split_example.expected"));
  ASSERT_EQ(input.size(), 1u);
  EXPECT_EQ(split_tokens(input[0], table), expected[0]);
}

TEST(Split, EmptyCorpusStaysEmpty) {
  SuffixTable table = SuffixTable::load(fixture("rules.tsv"));
  EXPECT_TRUE(split_corpus({}, table, Side::source).empty());
}

TEST(Split, OnlyTheChosenSideChanges) {
  SuffixTable table({{"ात", {"त"}, 2}}, {});
  ParallelCorpus corpus;
  corpus.pairs.push_back({0, {"रूपात"}, {"रूपात"}, ""});
  ParallelCorpus out = split_corpus(corpus, table, Side::target);
  EXPECT_EQ(out.pairs[0].source, Tokens{"रूपात"});
  EXPECT_EQ(out.pairs[0].target, (Tokens{"रूप", "त"}));
}

TEST(SplitProperty, IdempotentOnFixtureCorpus) {
  SuffixTable table = SuffixTable::load(fixture("rules.tsv"));
  ParallelCorpus corpus = ingest_manifest(fixture("train/manifest.tsv"));
  ParallelCorpus once = split_corpus(corpus, table, Side::source);
  ParallelCorpus twice = split_corpus(once, table, Side::source);
  EXPECT_EQ(once, twice);
}

TEST(SplitValidation, NonTerminalEmitIsRejected) {
  // "मध्ये" ends with "्ये", so the emitted token would split again.
  EXPECT_THROW(SuffixTable({{"ांमध्ये", {"मध्ये"}, 1}, {"्ये", {"ये"}, 1}}, {}), ValidationError);
  EXPECT_THROW(SuffixTable({{"ात", {"त"}, 2}}, {{"आहेत", {"रूपात"}}}), ValidationError);
}

TEST(SplitValidation, MalformedRules) {
  EXPECT_THROW(SuffixTable({{"", {"x"}, 1}}, {}), ValidationError);
  EXPECT_THROW(SuffixTable({{"ात", {}, 1}}, {}), ValidationError);
  EXPECT_THROW(SuffixTable({{"ात", {"त"}, 1}, {"ात", {"त"}, 2}}, {}), ValidationError);
  TempDir dir;
  write_file(dir / "r.tsv", "prefix\tx\ty\t1\n");
  EXPECT_THROW(SuffixTable::load(dir / "r.tsv"), ParseError);
  write_file(dir / "r.tsv", "suffix\tx\n");
  EXPECT_THROW(SuffixTable::load(dir / "r.tsv"), ParseError);
  write_file(dir / "r.tsv", "suffix\tात\tत\t0\n");
  EXPECT_THROW(SuffixTable::load(dir / "r.tsv"), ValidationError);
}

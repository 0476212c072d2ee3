#include "lexsmt/eval.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lexsmt/error.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace lexsmt;
using testing_support::TempDir;

namespace {

Tokens random_sentence(std::mt19937_64& rng, std::size_t max_len, const Tokens& vocab) {
  Tokens out;
  for (std::size_t k = rng() % (max_len + 1); k > 0; --k) out.push_back(vocab[rng() % vocab.size()]);
  return out;
}

}  // namespace

TEST(Bleu, IdentityIsOneHundred) {
  std::vector<Tokens> refs = {{"a", "b", "c", "d", "e"}, {"x", "y", "z", "w"}};
  EXPECT_NEAR(bleu(refs, refs).score, 100.0, 1e-9);
}

TEST(Bleu, NoOverlapIsZero) {
  EXPECT_EQ(bleu({{"p", "q", "r", "s"}}, {{"a", "b", "c", "d"}}).score, 0.0);
}

TEST(Bleu, ClippedUnigramsByHand) {
  BleuStats s = bleu_stats({"the", "the", "the"}, {"the", "cat"});
  EXPECT_EQ(s.matches[0], 1u);
  EXPECT_EQ(s.totals[0], 3u);
  EXPECT_EQ(s.matches[1], 0u);
  EXPECT_EQ(s.totals[1], 2u);
  // Alone it has no bigram match, so corpus BLEU is zero.
  EXPECT_EQ(bleu({{"the", "the", "the"}}, {{"the", "cat"}}).score, 0.0);
  // Next to a 4-token exact match: p = 5/7, 3/5, 2/3, 1/1 and no brevity
  // penalty (7 hypothesis tokens against 6).
  BleuResult r = bleu({{"the", "the", "the"}, {"a", "b", "c", "d"}},
                      {{"the", "cat"}, {"a", "b", "c", "d"}});
  EXPECT_NEAR(r.score, 100.0 * std::pow(5.0 / 7 * 3.0 / 5 * 2.0 / 3, 0.25), 1e-9);
  EXPECT_NEAR(r.precisions[0], 5.0 / 7, 1e-12);
  EXPECT_EQ(r.brevity_penalty, 1.0);
}

TEST(Bleu, BrevityPenalty) {
  BleuResult r = bleu({{"a", "b"}}, {{"a", "b", "c", "d"}}, 2);
  EXPECT_NEAR(r.brevity_penalty, std::exp(1.0 - 4.0 / 2.0), 1e-12);
  EXPECT_NEAR(r.score, 100.0 * std::exp(-1.0), 1e-9);
}

TEST(Bleu, OrdersBeyondTheHypothesisAreSkipped) {
  // Two-token sentences have no trigrams; only orders 1 and 2 count.
  EXPECT_NEAR(bleu({{"a", "b"}}, {{"a", "b"}}).score, 100.0, 1e-9);
}

TEST(Bleu, LengthMismatchIsAContractError) {
  EXPECT_THROW(bleu({{"a"}}, {}), ContractError);
}

TEST(Bleu, SmoothedSentenceScoreIsPositive) {
  BleuStats s = bleu_stats({"the", "the", "the"}, {"the", "cat"});
  EXPECT_GT(smoothed_bleu_from_stats(s), 0.0);
  EXPECT_EQ(bleu_from_stats(s), 0.0);
}

TEST(BleuProperty, StatsAddUpAndScoresStayInRange) {
  std::mt19937_64 rng(9);
  const Tokens vocab = {"a", "b", "c"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Tokens> hyps, refs;
    BleuStats summed;
    for (std::size_t k = 1 + rng() % 4; k > 0; --k) {
      hyps.push_back(random_sentence(rng, 6, vocab));
      refs.push_back(random_sentence(rng, 6, vocab));
      summed += bleu_stats(hyps.back(), refs.back());
    }
    BleuResult r = bleu(hyps, refs);
    EXPECT_EQ(r.stats, summed);
    EXPECT_GE(r.score, 0.0);
    EXPECT_LE(r.score, 100.0 + 1e-9);
    BleuStats back = summed;
    back -= summed;
    EXPECT_EQ(back, BleuStats{});
  }
}

TEST(Meteor, IdentityFollowsTheFormula) {
  const Tokens s = {"a", "b", "c", "d"};
  EXPECT_NEAR(meteor_lite(s, s), 1.0 - 0.5 * std::pow(1.0 / 4.0, 3.0), 1e-12);
  EXPECT_GT(meteor_lite(s, s), 0.99);
}

TEST(Meteor, ZeroMatchesIsZero) {
  EXPECT_EQ(meteor_lite({"a", "b"}, {"c", "d"}), 0.0);
  EXPECT_EQ(meteor_lite({}, {"c"}), 0.0);
}

TEST(Meteor, ChunksAndFmeanByHand) {
  // Matches a and b in swapped order: m = 2, 2 chunks, P = 2/3, R = 1.
  MeteorStats st = meteor_stats({"b", "a", "x"}, {"a", "b"});
  EXPECT_EQ(st.matches, 2u);
  EXPECT_EQ(st.chunks, 2u);
  const double p = 2.0 / 3, r = 1.0;
  const double fmean = p * r / (0.9 * p + 0.1 * r);
  EXPECT_NEAR(meteor_from_stats(st), fmean * (1 - 0.5 * std::pow(2.0 / 2.0, 3.0)), 1e-12);
}

TEST(Meteor, SynonymsRaiseTheScore) {
  ResourceSet res;
  res.add({{"big"}, {"large"}, Category::synset});
  const Tokens hyp = {"the", "big", "house"};
  const Tokens ref = {"the", "large", "house"};
  EXPECT_GT(meteor_lite(hyp, ref, &res), meteor_lite(hyp, ref));
  ResourceSet empty;
  EXPECT_EQ(meteor_lite(hyp, ref, &empty), meteor_lite(hyp, ref));
}

TEST(Meteor, SiblingTargetsAreSynonyms) {
  ResourceSet res;
  res.add({{"पेड़"}, {"झाड"}, Category::synset});
  res.add({{"पेड़"}, {"वृक्ष"}, Category::synset});
  SynonymIndex index(res);
  EXPECT_TRUE(index.synonyms("झाड", "वृक्ष"));
  EXPECT_TRUE(index.synonyms("पेड़", "झाड"));
  EXPECT_FALSE(index.synonyms("झाड", "नदी"));
}

TEST(Ter, OneSubstitutionOutOfFour) {
  EXPECT_NEAR(ter({"a", "b", "x", "d"}, {"a", "b", "c", "d"}), 25.0, 1e-12);
}

TEST(Ter, EmptyHypothesisDeletesEverything) {
  EXPECT_NEAR(ter({}, {"a", "b", "c", "d"}), 100.0, 1e-12);
  EXPECT_EQ(ter({"a"}, {"a"}), 0.0);
  EXPECT_THROW(ter({"a"}, {}), ContractError);
}

TEST(Ter, BlockShiftCostsOne) {
  TerStats st = ter_stats({"c", "d", "a", "b"}, {"a", "b", "c", "d"});
  EXPECT_EQ(st.shifts, 1u);
  EXPECT_EQ(st.edits, 0u);
  EXPECT_NEAR(ter_from_stats(st), 25.0, 1e-12);
  TerOptions no_shift;
  no_shift.shifts = false;
  EXPECT_NEAR(ter({"c", "d", "a", "b"}, {"a", "b", "c", "d"}, no_shift), 100.0, 1e-12);
}

TEST(TerProperty, NoShiftModeMatchesTheDpOracle) {
  const Tokens vocab = {"a", "b", "c"};
  TerOptions no_shift;
  no_shift.shifts = false;
  std::vector<Tokens> all = {{}};
  for (std::size_t len = 1; len <= 3; ++len) {
    std::vector<Tokens> next;
    for (const Tokens& t : all) {
      if (t.size() != len - 1) continue;
      for (const auto& w : vocab) {
        Tokens e = t;
        e.push_back(w);
        next.push_back(e);
      }
    }
    all.insert(all.end(), next.begin(), next.end());
  }
  for (const Tokens& hyp : all) {
    for (const Tokens& ref : all) {
      EXPECT_EQ(edit_distance(hyp, ref), oracle::edit_distance(hyp, ref));
      if (ref.empty()) continue;
      EXPECT_NEAR(ter(hyp, ref, no_shift),
                  100.0 * static_cast<double>(oracle::edit_distance(hyp, ref)) / ref.size(),
                  1e-9);
    }
  }
}

TEST(TerProperty, ShiftsNeverHurt) {
  std::mt19937_64 rng(12);
  const Tokens vocab = {"a", "b", "c", "d"};
  TerOptions no_shift;
  no_shift.shifts = false;
  for (int trial = 0; trial < 500; ++trial) {
    Tokens hyp = random_sentence(rng, 8, vocab);
    Tokens ref = random_sentence(rng, 8, vocab);
    if (ref.empty()) continue;
    const double with = ter(hyp, ref);
    EXPECT_LE(with, ter(hyp, ref, no_shift) + 1e-12);
    EXPECT_GE(with, 0.0);
  }
}

TEST(Evaluate, CorpusScoresCombineSentenceStats) {
  std::vector<Tokens> refs = {{"a", "b", "c", "d"}, {"x", "y", "z"}};
  std::vector<Tokens> hyps = {{"a", "b", "c", "e"}, {"x", "y", "z"}};
  EvalScores s = evaluate(hyps, refs);
  EXPECT_NEAR(s.ter, 100.0 / 7.0, 1e-12);
  EXPECT_NEAR(s.bleu, bleu(hyps, refs).score, 1e-12);
  EXPECT_GT(s.meteor, 0.0);
  EXPECT_LE(s.meteor, 1.0);
}

TEST(Bootstrap, DeterministicAndBracketsTheScore) {
  std::mt19937_64 rng(2);
  const Tokens vocab = {"a", "b", "c", "d"};
  std::vector<Tokens> hyps, refs;
  for (int i = 0; i < 40; ++i) {
    refs.push_back(random_sentence(rng, 8, vocab));
    hyps.push_back(rng() % 2 ? refs.back() : random_sentence(rng, 8, vocab));
  }
  BootstrapInterval a = bootstrap_bleu(hyps, refs, 200, 7);
  BootstrapInterval b = bootstrap_bleu(hyps, refs, 200, 7);
  EXPECT_EQ(a.low, b.low);
  EXPECT_EQ(a.high, b.high);
  const double score = bleu(hyps, refs).score;
  EXPECT_LE(a.low, score);
  EXPECT_GE(a.high, score);
}

TEST(Subjective, AggregatesToPercentages) {
  SubjectiveSummary all5 = aggregate_subjective({{"1", 5, 5}, {"2", 5, 5}});
  EXPECT_DOUBLE_EQ(all5.adequacy_percent, 100.0);
  SubjectiveSummary mixed =
      aggregate_subjective({{"1", 5, 5}, {"2", 5, 4}, {"3", 4, 5}, {"4", 4, 4}});
  EXPECT_DOUBLE_EQ(mixed.adequacy_percent, 90.0);
  EXPECT_DOUBLE_EQ(mixed.fluency_percent, 90.0);
  EXPECT_EQ(format_percent(mixed.fluency_percent), "90.00%");
}

TEST(Subjective, RejectsBadInput) {
  EXPECT_THROW(aggregate_subjective({{"1", 6, 5}}), ValidationError);
  EXPECT_THROW(aggregate_subjective({{"1", 5, 0}}), ValidationError);
  EXPECT_THROW(aggregate_subjective({}), ContractError);
  TempDir dir;
  write_file(dir / "r.tsv", "1\t5\t4\n2\t3\t3\n");
  auto ratings = load_subjective(dir / "r.tsv");
  ASSERT_EQ(ratings.size(), 2u);
  EXPECT_EQ(ratings[1].id, "2");
  EXPECT_EQ(ratings[0].fluency, 4.0);
  write_file(dir / "bad.tsv", "1\t5\n");
  EXPECT_THROW(load_subjective(dir / "bad.tsv"), ParseError);
}

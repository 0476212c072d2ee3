#include "lexsmt/decoder.hpp"

#include <gtest/gtest.h>

#include <random>

#include "lexsmt/error.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace lexsmt;
using testing_support::fixture;

namespace {

PhraseEntry entry(Tokens target, double p = 0.5) {
  PhraseEntry e;
  e.target = std::move(target);
  e.scores = {p, p, p, p};
  e.count = 1;
  return e;
}

DecoderConfig exhaustive_config() {
  DecoderConfig config;
  config.beam = 1000000;
  config.distortion_limit = -1;
  config.options_limit = 0;
  return config;
}

void expect_features_near(const FeatureVector& a, const FeatureVector& b, double tol) {
  for (std::size_t k = 0; k < kNumFeatures; ++k) EXPECT_NEAR(a[k], b[k], tol) << feature_name(k);
}

}  // namespace

TEST(Decoder, SingleEntryIsTheOnlyHypothesis) {
  PhraseTable table;
  table.add({"w"}, entry({"v"}));
  NGramModel lm = train_lm({{"v"}});
  Decoder decoder(table, lm, WeightVector::defaults());
  Translation t = decoder.decode({"w"});
  EXPECT_EQ(t.tokens, Tokens{"v"});
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_FALSE(t.steps[0].unknown);
}

TEST(Decoder, UnknownWordPassesThrough) {
  PhraseTable table;
  table.add({"w"}, entry({"v"}));
  NGramModel lm = train_lm({{"v"}});
  Decoder decoder(table, lm, WeightVector::defaults());
  Translation t = decoder.decode({"w", "mystery"});
  EXPECT_EQ(t.tokens, (Tokens{"v", "mystery"}));
  const double u = std::log(kUnknownPhraseProb);
  EXPECT_NEAR(t.features[kPTargetGivenSource], std::log(0.5) + u, 1e-12);
}

TEST(Decoder, MarkUnkRendersTheMarker) {
  PhraseTable table = PhraseTable::load(fixture("worked/unk_table.txt"));
  NGramModel lm = train_lm(read_sentences(fixture("worked/unk_lm.hi")));
  DecoderConfig config;
  config.mark_unk = true;
  Decoder decoder(table, lm, WeightVector::defaults(), config);
  const Tokens source = read_sentences(fixture("worked/unk_example.mr"))[0];
  // Read raw: the tokenizer would split the marker into "|", "UNK", "|".
  const std::string expected(trim(read_file(fixture("worked/unk_example.expected"))));
  EXPECT_EQ(expected, "वह घर |UNK| जाता ।");
  EXPECT_EQ(join(decoder.decode(source).tokens), expected);
}

TEST(Decoder, EmptySentenceGivesEmptyOutput) {
  PhraseTable table;
  NGramModel lm = train_lm({{"v"}});
  Decoder decoder(table, lm, WeightVector::defaults());
  EXPECT_TRUE(decoder.decode({}).tokens.empty());
  EXPECT_EQ(decoder.decode_nbest({}, 5).size(), 1u);
}

TEST(Decoder, CollectOptionsAddsPassThroughOnlyWhenNeeded) {
  PhraseTable table;
  table.add({"a", "b"}, entry({"x"}));
  table.add({"b"}, entry({"y"}));
  NGramModel lm = train_lm({{"x", "y"}});
  Decoder decoder(table, lm, WeightVector::defaults());
  int unknown = 0;
  for (const auto& o : decoder.collect_options({"a", "b"})) {
    if (o.unknown) {
      ++unknown;
      EXPECT_EQ(o.source_start, 0);
    }
  }
  EXPECT_EQ(unknown, 1);
}

TEST(Decoder, OneBestEqualsDecode) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    oracle::TinyInstance inst = oracle::random_instance(rng);
    Decoder decoder(inst.table, inst.lm, inst.weights);
    auto nbest = decoder.decode_nbest(inst.sentence, 1);
    ASSERT_EQ(nbest.size(), 1u);
    EXPECT_EQ(nbest[0].tokens, decoder.decode(inst.sentence).tokens);
  }
}

TEST(DecoderProperty, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    oracle::TinyInstance inst = oracle::random_instance(rng);
    Decoder decoder(inst.table, inst.lm, inst.weights, exhaustive_config());
    auto expected = oracle::enumerate_translations(inst.sentence, inst.table, inst.lm,
                                                   inst.weights);
    auto got = decoder.decode_nbest(inst.sentence, 5);
    ASSERT_EQ(got.size(), std::min<std::size_t>(5, expected.size())) << join(inst.sentence);
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_EQ(got[k].tokens, expected[k].tokens) << "rank " << k;
      EXPECT_NEAR(got[k].score, expected[k].score, 1e-9);
    }
  }
}

TEST(DecoderProperty, NBestIsSortedAndDistinct) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::TinyInstance inst = oracle::random_instance(rng);
    Decoder decoder(inst.table, inst.lm, inst.weights);
    auto nbest = decoder.decode_nbest(inst.sentence, 10);
    std::set<Tokens> seen;
    for (std::size_t k = 0; k < nbest.size(); ++k) {
      EXPECT_TRUE(seen.insert(nbest[k].tokens).second);
      // Near-equal scores are ordered by string, so allow rounding noise.
      if (k > 0) EXPECT_LE(nbest[k].score, nbest[k - 1].score + 1e-9);
    }
  }
}

TEST(DecoderProperty, FeaturesAreRecomputableFromTheDerivation) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::TinyInstance inst = oracle::random_instance(rng);
    Decoder decoder(inst.table, inst.lm, inst.weights);
    for (const Translation& t : decoder.decode_nbest(inst.sentence, 5)) {
      expect_features_near(t.features, derivation_features(t.steps, inst.lm), 1e-9);
      EXPECT_NEAR(t.score, inst.weights.dot(t.features), 1e-9);
      EXPECT_EQ(t.tokens, derivation_target(t.steps));
      int covered = 0;
      for (const auto& s : t.steps) covered += s.source_end - s.source_start;
      EXPECT_EQ(covered, static_cast<int>(inst.sentence.size()));
    }
  }
}

TEST(DecoderProperty, PositiveScalingKeepsTheArgmax) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::TinyInstance inst = oracle::random_instance(rng);
    WeightVector scaled = inst.weights;
    const double c = std::uniform_real_distribution<double>(0.1, 10)(rng);
    for (double& w : scaled.values) w *= c;
    Decoder a(inst.table, inst.lm, inst.weights);
    Decoder b(inst.table, inst.lm, scaled);
    EXPECT_EQ(a.decode(inst.sentence).tokens, b.decode(inst.sentence).tokens);
  }
}

TEST(DecoderProperty, WiderBeamNeverScoresLower) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::TinyInstance inst = oracle::random_instance(rng, 4, 3);
    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t beam : {1, 2, 4, 16, 1000}) {
      DecoderConfig config;
      config.beam = beam;
      Decoder decoder(inst.table, inst.lm, inst.weights, config);
      const double score = decoder.decode(inst.sentence).score;
      EXPECT_GE(score, previous - 1e-9) << "beam " << beam;
      previous = std::max(previous, score);
    }
  }
}

TEST(Decoder, MonotoneDictionarySubstitution) {
  const Tokens src = {"a", "b", "c", "d", "e"};
  const Tokens tgt = {"v", "w", "x", "y", "z"};
  PhraseTable table;
  for (std::size_t i = 0; i < src.size(); ++i) table.add({src[i]}, entry({tgt[i]}, 1.0));
  std::mt19937_64 rng(3);
  std::vector<Tokens> lm_text;
  for (int s = 0; s < 50; ++s) {
    Tokens line;
    for (int k = 0; k < 6; ++k) line.push_back(tgt[rng() % tgt.size()]);
    lm_text.push_back(line);
  }
  NGramModel lm = train_lm(lm_text);
  DecoderConfig config;
  config.distortion_limit = 0;
  Decoder decoder(table, lm, WeightVector::defaults(), config);
  for (int s = 0; s < 30; ++s) {
    Tokens in, expected;
    for (int k = 0; k < 7; ++k) {
      const std::size_t i = rng() % src.size();
      in.push_back(src[i]);
      expected.push_back(tgt[i]);
    }
    EXPECT_EQ(decoder.decode(in).tokens, expected);
  }
}

TEST(Decoder, DistortionLimitZeroKeepsOrder) {
  PhraseTable table;
  table.add({"a"}, entry({"x"}));
  table.add({"b"}, entry({"y"}));
  // The LM strongly prefers "y x".
  std::vector<Tokens> text(20, Tokens{"y", "x"});
  NGramModel lm = train_lm(text);
  WeightVector w = WeightVector::defaults();
  w.values[kDistortion] = 0.0;
  DecoderConfig free_config;
  free_config.distortion_limit = -1;
  EXPECT_EQ(Decoder(table, lm, w, free_config).decode({"a", "b"}).tokens, (Tokens{"y", "x"}));
  DecoderConfig monotone;
  monotone.distortion_limit = 0;
  EXPECT_EQ(Decoder(table, lm, w, monotone).decode({"a", "b"}).tokens, (Tokens{"x", "y"}));
}

TEST(Decoder, CorpusDecodingKeepsOrderAcrossThreads) {
  std::mt19937_64 rng(41);
  oracle::TinyInstance inst = oracle::random_instance(rng);
  Decoder decoder(inst.table, inst.lm, inst.weights);
  std::vector<Tokens> sentences;
  for (int i = 0; i < 12; ++i) {
    Tokens s = inst.sentence;
    std::shuffle(s.begin(), s.end(), rng);
    sentences.push_back(s);
  }
  EXPECT_EQ(decode_corpus(decoder, sentences, 1), decode_corpus(decoder, sentences, 3));
}

TEST(Weights, ParseDumpRoundTrip) {
  WeightVector w = WeightVector::defaults();
  w.values[kDistortion] = -0.125;
  EXPECT_EQ(WeightVector::parse(w.dump()), w);
  EXPECT_THROW(WeightVector::parse("lm 1\n"), ParseError);
  EXPECT_THROW(WeightVector::parse(w.dump() + "bogus 1\n"), ParseError);
  WeightVector bad = w;
  bad.values[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(NBestFile, LineRoundTrip) {
  Translation t;
  t.tokens = {"वह", "घर"};
  t.features = {-1, -2, -3, -4, -5.5, -2, 0};
  t.score = -3.25;
  const std::string line = nbest_line(4, t);
  NBestEntry e = parse_nbest_line(line);
  EXPECT_EQ(e.sentence_id, 4u);
  EXPECT_EQ(e.tokens, t.tokens);
  EXPECT_EQ(e.features, t.features);
  EXPECT_EQ(e.score, t.score);
  EXPECT_THROW(parse_nbest_line("1 ||| a"), ParseError);
}

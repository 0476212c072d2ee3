#include "lexsmt/align.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "lexsmt/error.hpp"
#include "temp_dir.hpp"

using namespace lexsmt;
using testing_support::TempDir;

namespace {

ParallelCorpus corpus_of(std::vector<std::pair<std::string, std::string>> rows) {
  ParallelCorpus corpus;
  for (auto& [s, t] : rows) corpus.pairs.push_back({0, split_spaces(s), split_spaces(t), ""});
  corpus.reindex();
  return corpus;
}

// Textbook Model 1 with a NULL source word, written with plain maps.
std::map<std::pair<std::string, std::string>, double> reference_em(const ParallelCorpus& corpus,
                                                                   int iterations) {
  std::map<std::pair<std::string, std::string>, double> t;
  std::map<std::string, std::set<std::string>> cooc;
  for (const auto& p : corpus.pairs) {
    Tokens src = p.source;
    src.insert(src.begin(), kNullWord);
    for (const auto& s : src) {
      for (const auto& w : p.target) cooc[s].insert(w);
    }
  }
  for (const auto& [s, ws] : cooc) {
    for (const auto& w : ws) t[{s, w}] = 1.0 / static_cast<double>(ws.size());
  }
  for (int it = 0; it < iterations; ++it) {
    std::map<std::pair<std::string, std::string>, double> count;
    std::map<std::string, double> total;
    for (const auto& p : corpus.pairs) {
      Tokens src = p.source;
      src.insert(src.begin(), kNullWord);
      for (const auto& w : p.target) {
        double z = 0.0;
        for (const auto& s : src) z += t[{s, w}];
        for (const auto& s : src) {
          count[{s, w}] += t[{s, w}] / z;
          total[s] += t[{s, w}] / z;
        }
      }
    }
    for (auto& [key, value] : t) value = count[key] / total[key.first];
  }
  return t;
}

ParallelCorpus random_toy_corpus(std::mt19937_64& rng) {
  static const Tokens src_vocab = {"a", "b", "c", "d"};
  static const Tokens tgt_vocab = {"w", "x", "y", "z"};
  ParallelCorpus corpus;
  const std::size_t n = 1 + rng() % 6;
  for (std::size_t i = 0; i < n; ++i) {
    SentencePair p;
    p.id = i;
    for (std::size_t k = 1 + rng() % 4; k > 0; --k) p.source.push_back(src_vocab[rng() % 4]);
    for (std::size_t k = 1 + rng() % 4; k > 0; --k) p.target.push_back(tgt_vocab[rng() % 4]);
    corpus.pairs.push_back(p);
  }
  return corpus;
}

AlignmentSet links(std::size_t rows, std::size_t cols, std::vector<std::pair<int, int>> items) {
  AlignmentSet a(rows, cols);
  for (auto [s, t] : items) a.add(s, t);
  return a;
}

}  // namespace

TEST(Model1, ToyCorpusConverges) {
  ParallelCorpus corpus = corpus_of({{"la maison", "the house"}, {"la", "the"}});
  Model1Options options;
  options.iterations = 20;
  Model1Result result = train_model1(corpus, options);
  EXPECT_GT(result.table.prob("la", "the"), 0.9);
  EXPECT_EQ(result.log_likelihood.size(), 21u);
}

TEST(Model1, MatchesReferenceEm) {
  ParallelCorpus corpus = corpus_of({{"la maison", "the house"}, {"la", "the"},
                                     {"la fleur", "the flower"}, {"maison bleu", "blue house"}});
  for (int iterations : {1, 3, 10}) {
    Model1Options options;
    options.iterations = iterations;
    Model1Result result = train_model1(corpus, options);
    for (const auto& [key, value] : reference_em(corpus, iterations)) {
      const double got = key.first == kNullWord ? result.table.null_prob(key.second)
                                                : result.table.prob(key.first, key.second);
      EXPECT_NEAR(got, value, 1e-12) << key.first << " -> " << key.second;
    }
  }
}

TEST(Model1, SinglePairHasAllMass) {
  Model1Result result = train_model1(corpus_of({{"a", "x"}}));
  EXPECT_DOUBLE_EQ(result.table.prob("a", "x"), 1.0);
}

TEST(Model1, UnseenPairsGetTheFloor) {
  Model1Result result = train_model1(corpus_of({{"a", "x"}}));
  EXPECT_EQ(result.table.prob("a", "q"), TranslationTable::kDefaultFloor);
  EXPECT_EQ(result.table.prob("q", "x"), TranslationTable::kDefaultFloor);
}

TEST(Model1, EmptyCorpusFails) {
  EXPECT_THROW(train_model1(ParallelCorpus{}), TrainingError);
}

TEST(Model1Property, RowsSumToOneAndLikelihoodRises) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    ParallelCorpus corpus = random_toy_corpus(rng);
    Model1Options options;
    options.iterations = 8;
    Model1Result result = train_model1(corpus, options);
    for (WordId s = 0; s < result.table.num_rows(); ++s) {
      if (result.table.row(s).empty()) continue;
      EXPECT_NEAR(result.table.row_sum(s), 1.0, 1e-9);
    }
    for (std::size_t k = 1; k < result.log_likelihood.size(); ++k) {
      EXPECT_GE(result.log_likelihood[k], result.log_likelihood[k - 1] - 1e-9);
    }
  }
}

TEST(Model1Property, ThreadCountDoesNotChangeTheTable) {
  std::mt19937_64 rng(8);
  ParallelCorpus corpus;
  for (int i = 0; i < 20; ++i) {
    ParallelCorpus part = random_toy_corpus(rng);
    for (auto& p : part.pairs) corpus.pairs.push_back(p);
  }
  // Enough pairs for several E-step chunks.
  for (int i = 0; i < 6; ++i) {
    ParallelCorpus copy = corpus;
    for (auto& p : copy.pairs) corpus.pairs.push_back(p);
  }
  corpus.reindex();
  Model1Options one;
  one.threads = 1;
  Model1Options four = one;
  four.threads = 4;
  EXPECT_EQ(train_model1(corpus, one).table.dump(), train_model1(corpus, four).table.dump());
}

TEST(Model1, DumpLoadRoundTrip) {
  TempDir dir;
  Model1Result result = train_model1(corpus_of({{"la maison", "the house"}, {"la", "the"}}));
  result.table.write(dir / "t.tsv");
  TranslationTable loaded = TranslationTable::load(dir / "t.tsv");
  EXPECT_EQ(loaded.dump(), result.table.dump());
  EXPECT_DOUBLE_EQ(loaded.prob("la", "the"), result.table.prob("la", "the"));
}

TEST(Viterbi, ToyTablePicksTheDiagonal) {
  ParallelCorpus corpus = corpus_of({{"la maison", "the house"}, {"la", "the"}});
  Model1Options options;
  options.iterations = 20;
  TranslationTable table = train_model1(corpus, options).table;
  AlignmentSet a = viterbi_align(corpus.pairs[0], table);
  EXPECT_EQ(a, links(2, 2, {{0, 0}, {1, 1}}));
}

TEST(Viterbi, EmptyTargetGivesNoLinks) {
  TranslationTable table = train_model1(corpus_of({{"a", "x"}})).table;
  EXPECT_TRUE(viterbi_align({0, {"a"}, {}, ""}, table).empty());
}

TEST(Viterbi, TieGoesToLowestSourceIndex) {
  TranslationTable table;
  const WordId a = table.source_vocab().intern("a");
  const WordId b = table.source_vocab().intern("b");
  const WordId x = table.target_vocab().intern("x");
  table.set(a, x, 0.5);
  table.set(b, x, 0.5);
  EXPECT_EQ(viterbi_align({0, {"b", "a"}, {"x"}, ""}, table), links(2, 1, {{0, 0}}));
  // NULL must be strictly better to leave the word unaligned.
  table.set(TranslationTable::kNull, x, 0.5);
  EXPECT_EQ(viterbi_align({0, {"a"}, {"x"}, ""}, table).size(), 1u);
  table.set(TranslationTable::kNull, x, 0.6);
  EXPECT_TRUE(viterbi_align({0, {"a"}, {"x"}, ""}, table).empty());
}

TEST(Symmetrize, IntersectionAndUnion) {
  AlignmentSet diag = links(2, 2, {{0, 0}, {1, 1}});
  EXPECT_EQ(symmetrize(diag, diag, Heuristic::intersection), diag);
  EXPECT_EQ(symmetrize(links(2, 2, {{0, 0}}), links(2, 2, {{1, 1}}), Heuristic::union_), diag);
}

TEST(Symmetrize, GrowDiagFinalAndHandTrace) {
  // Intersection {(0,0)}. Growing from (0,0) adds (0,1), whose target is
  // unaligned, then the diagonal (1,1), whose source is unaligned.
  AlignmentSet forward = links(2, 2, {{0, 0}, {1, 1}});
  AlignmentSet backward = links(2, 2, {{0, 0}, {0, 1}});
  EXPECT_EQ(symmetrize(forward, backward, Heuristic::grow_diag_final_and),
            links(2, 2, {{0, 0}, {0, 1}, {1, 1}}));
}

TEST(Symmetrize, FinalAndStepAddsIsolatedLinks) {
  AlignmentSet forward = links(3, 3, {{0, 0}, {2, 2}});
  AlignmentSet backward = links(3, 3, {{0, 0}});
  EXPECT_EQ(symmetrize(forward, backward, Heuristic::grow_diag_final_and),
            links(3, 3, {{0, 0}, {2, 2}}));
}

TEST(Symmetrize, ShapeMismatchIsAContractError) {
  EXPECT_THROW(symmetrize(AlignmentSet(2, 2), AlignmentSet(2, 3), Heuristic::union_),
               ContractError);
  EXPECT_THROW(AlignmentSet(2, 2).add(2, 0), ContractError);
}

TEST(SymmetrizeProperty, SandwichedBetweenIntersectionAndUnion) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t rows = 1 + rng() % 5;
    const std::size_t cols = 1 + rng() % 5;
    AlignmentSet f(rows, cols), b(rows, cols);
    for (std::size_t k = rng() % 8; k > 0; --k) f.add(rng() % rows, rng() % cols);
    for (std::size_t k = rng() % 8; k > 0; --k) b.add(rng() % rows, rng() % cols);
    AlignmentSet inter = symmetrize(f, b, Heuristic::intersection);
    AlignmentSet uni = symmetrize(f, b, Heuristic::union_);
    AlignmentSet gdfa = symmetrize(f, b, Heuristic::grow_diag_final_and);
    for (const Link& l : inter.links()) EXPECT_TRUE(gdfa.contains(l.source, l.target));
    for (const Link& l : gdfa.links()) EXPECT_TRUE(uni.contains(l.source, l.target));
    for (const Link& l : inter.links()) {
      EXPECT_TRUE(f.contains(l.source, l.target) && b.contains(l.source, l.target));
    }
  }
}

TEST(AlignmentSet, TextRoundTrip) {
  AlignmentSet a = links(3, 2, {{2, 1}, {0, 0}});
  EXPECT_EQ(a.to_string(), "0-0 2-1");
  EXPECT_EQ(AlignmentSet::parse(a.to_string(), 3, 2), a);
  EXPECT_EQ(a.transposed().transposed(), a);
  EXPECT_THROW(AlignmentSet::parse("0:1", 3, 2), ParseError);
}

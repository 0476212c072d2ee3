#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "lexsmt/align.hpp"
#include "lexsmt/corpus.hpp"

namespace lexsmt {

// Half-open spans [start, end) on both sides plus the links inside the pair,
// in phrase-relative coordinates.
struct PhrasePair {
  int source_start = 0;
  int source_end = 0;
  int target_start = 0;
  int target_end = 0;
  Tokens source;
  Tokens target;
  std::vector<Link> links;

  bool operator==(const PhrasePair&) const = default;
};

// All phrase pairs consistent with `alignment` whose sides are at most
// `max_phrase_len` tokens. A source span must contain an aligned word;
// unaligned target words at the projected boundary extend the target span.
std::vector<PhrasePair> extract_phrases(const SentencePair& pair, const AlignmentSet& alignment,
                                        int max_phrase_len = 7);

std::vector<PhrasePair> extract_corpus(const ParallelCorpus& corpus,
                                       const std::vector<AlignmentSet>& alignments,
                                       int max_phrase_len = 7);

struct PhraseScores {
  double p_target_given_source = 0.0;
  double p_source_given_target = 0.0;
  double lex_target_given_source = 0.0;
  double lex_source_given_target = 0.0;

  bool operator==(const PhraseScores&) const = default;
};

struct PhraseEntry {
  Tokens target;
  PhraseScores scores;
  std::uint32_t count = 0;
};

class PhraseTable {
 public:
  using Map = std::map<Tokens, std::vector<PhraseEntry>>;

  // Entries are kept sorted by target.
  void add(const Tokens& source, PhraseEntry entry);

  // nullptr when the source phrase is unknown.
  const std::vector<PhraseEntry>* lookup(const Tokens& source) const;

  bool has_source_word(const std::string& word) const { return source_words_.contains(word); }
  std::size_t max_source_length() const { return max_source_length_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const Map& records() const { return records_; }

  // "source ||| target ||| p(t|s) p(s|t) lex(t|s) lex(s|t)", sorted.
  std::string dump() const;
  void write(const std::filesystem::path& file) const;
  static PhraseTable load(const std::filesystem::path& file);

 private:
  Map records_;
  std::unordered_set<std::string> source_words_;
  std::size_t max_source_length_ = 0;
  std::size_t size_ = 0;
};

struct ScoreOptions {
  // Pairs seen fewer times are dropped before normalization.
  std::uint32_t min_count = 1;
};

// Relative frequencies in both directions plus lexical weights. For each
// target word the lexical weight averages t(target | source) over its aligned
// source words, or takes t(target | NULL) when unaligned; the product runs
// over the target words. lex(s|t) mirrors this with `backward`. A pair seen
// with several internal alignments uses its most frequent one.
PhraseTable score_phrase_table(const std::vector<PhrasePair>& extracted,
                               const TranslationTable& forward,
                               const TranslationTable& backward,
                               const ScoreOptions& options = {});

}  // namespace lexsmt

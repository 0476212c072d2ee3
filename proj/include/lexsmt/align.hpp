#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexsmt/corpus.hpp"

namespace lexsmt {

using WordId = std::uint32_t;

class Vocabulary {
 public:
  WordId intern(const std::string& word);
  std::optional<WordId> find(const std::string& word) const;
  const std::string& word(WordId id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_map<std::string, WordId> ids_;
  std::vector<std::string> words_;
};

inline constexpr const char* kNullWord = "NULL";

// Word translation probabilities t(target | source), one row per source word.
// Source id 0 is the NULL word.
class TranslationTable {
 public:
  static constexpr WordId kNull = 0;
  static constexpr double kDefaultFloor = 1e-7;

  explicit TranslationTable(double floor = kDefaultFloor);

  // Floor probability when the pair (or either word) was never seen.
  double prob(const std::string& source, const std::string& target) const;
  double prob(WordId source, WordId target) const;
  double null_prob(const std::string& target) const;

  void set(WordId source, WordId target, double p);

  Vocabulary& source_vocab() { return source_vocab_; }
  Vocabulary& target_vocab() { return target_vocab_; }
  const Vocabulary& source_vocab() const { return source_vocab_; }
  const Vocabulary& target_vocab() const { return target_vocab_; }

  std::size_t num_rows() const { return rows_.size(); }
  const std::unordered_map<WordId, double>& row(WordId source) const;
  double row_sum(WordId source) const;
  double floor() const { return floor_; }

  // TSV "source<TAB>target<TAB>probability", sorted by source then target.
  std::string dump() const;
  void write(const std::filesystem::path& file) const;
  static TranslationTable load(const std::filesystem::path& file,
                               double floor = kDefaultFloor);

 private:
  double floor_;
  Vocabulary source_vocab_;
  Vocabulary target_vocab_;
  std::vector<std::unordered_map<WordId, double>> rows_;
};

struct Model1Options {
  int iterations = 5;
  double floor = TranslationTable::kDefaultFloor;
  unsigned threads = 1;
};

struct Model1Result {
  TranslationTable table;
  // Corpus log-likelihood under the initial table and after each EM round,
  // so iterations + 1 values.
  std::vector<double> log_likelihood;
};

// IBM Model 1 trained by EM on t(target | source). Initialization is uniform
// over co-occurring words. E-step counts are accumulated per fixed-size chunk
// and merged in chunk order, so the result does not depend on `threads`.
Model1Result train_model1(const ParallelCorpus& corpus, const Model1Options& options = {});

struct Link {
  int source = 0;
  int target = 0;
  auto operator<=>(const Link&) const = default;
};

// Word links of one sentence pair.
class AlignmentSet {
 public:
  AlignmentSet() = default;
  AlignmentSet(std::size_t source_length, std::size_t target_length);

  // Throws ContractError when out of range. Duplicates are ignored.
  void add(int source, int target);
  bool contains(int source, int target) const;

  const std::vector<Link>& links() const { return links_; }
  std::size_t size() const { return links_.size(); }
  bool empty() const { return links_.empty(); }
  std::size_t source_length() const { return source_length_; }
  std::size_t target_length() const { return target_length_; }

  AlignmentSet transposed() const;

  // "i-j" pairs separated by spaces, sorted.
  std::string to_string() const;
  static AlignmentSet parse(std::string_view text, std::size_t source_length,
                            std::size_t target_length);

  bool operator==(const AlignmentSet& other) const {
    return source_length_ == other.source_length_ &&
           target_length_ == other.target_length_ && links_ == other.links_;
  }

 private:
  std::size_t source_length_ = 0;
  std::size_t target_length_ = 0;
  std::vector<Link> links_;
  std::vector<char> grid_;
};

// Each target word links to the source word maximizing t(target | source);
// ties go to the lowest source index, and NULL only wins when strictly
// better than every source word. NULL links are left out.
AlignmentSet viterbi_align(const SentencePair& pair, const TranslationTable& table);

enum class Heuristic { intersection, union_, grow_diag_final_and };

Heuristic parse_heuristic(std::string_view text);

// Both inputs in (source, target) coordinates; transpose backward links
// first.
AlignmentSet symmetrize(const AlignmentSet& forward, const AlignmentSet& backward,
                        Heuristic heuristic);

// Viterbi in both directions plus symmetrization for every pair.
// `backward` must be trained on the swapped corpus.
std::vector<AlignmentSet> align_corpus(const ParallelCorpus& corpus,
                                       const TranslationTable& forward,
                                       const TranslationTable& backward,
                                       Heuristic heuristic);

void write_alignments(const std::vector<AlignmentSet>& alignments,
                      const std::filesystem::path& file);

}  // namespace lexsmt

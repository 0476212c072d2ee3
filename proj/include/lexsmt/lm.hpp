#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexsmt/text.hpp"

namespace lexsmt {

struct LmOptions {
  int order = 3;
  // Weight of the maximum-likelihood estimate at each order above one; the
  // remainder goes to the next lower order.
  double lambda = 0.4;
  // Probability mass reserved for unknown words under every history.
  double unknown_floor = 1e-6;
};

// Jelinek-Mercer interpolated n-gram model over a closed vocabulary (training
// words plus </s>). The unigram level is add-one smoothed. A history never
// seen in training falls through to the next lower order. Known words share
// 1 - unknown_floor; the unknown word always gets unknown_floor.
class NGramModel {
 public:
  using Id = std::uint32_t;
  static constexpr Id kUnknown = 0;
  static constexpr Id kBos = 1;
  static constexpr Id kEos = 2;
  static constexpr const char* kBosToken = "<s>";
  static constexpr const char* kEosToken = "</s>";

  NGramModel() = default;

  int order() const { return options_.order; }
  const LmOptions& options() const { return options_; }

  Id id(const std::string& word) const;
  const std::string& word(Id id) const { return words_[id]; }

  // Predictable vocabulary: every training word plus </s>.
  std::vector<Id> vocabulary() const;

  // p(word | history); only the last order-1 ids of `history` are used and a
  // shorter history is treated as if padded with <s>.
  double prob(std::span<const Id> history, Id word) const;
  double log_prob(std::span<const Id> history, Id word) const;
  double unigram_prob(Id word) const;

  // Natural-log probability of `tokens` followed by </s>, with order-1 <s>
  // padding.
  double score_sequence(const Tokens& tokens) const;

  // Header line plus sorted n-gram counts.
  std::string dump() const;
  void write(const std::filesystem::path& file) const;
  static NGramModel load(const std::filesystem::path& file);

 private:
  friend NGramModel train_lm(const std::vector<Tokens>& sentences, const LmOptions& options);

  static NGramModel make_empty(const LmOptions& options);
  Id intern(const std::string& word);
  void count_ngram(const std::u32string& key, std::uint64_t count);
  double interpolated(std::span<const Id> history, Id word, int n) const;

  LmOptions options_;
  std::unordered_map<std::string, Id> ids_;
  std::vector<std::string> words_;
  // counts_[n-1]: n-gram counts; history_counts_[n-1]: sum over continuations
  // of an (n-1)-word history for order n.
  std::vector<std::unordered_map<std::u32string, std::uint64_t>> counts_;
  std::vector<std::unordered_map<std::u32string, std::uint64_t>> history_counts_;
  std::uint64_t unigram_total_ = 0;
  std::size_t vocabulary_size_ = 0;
};

NGramModel train_lm(const std::vector<Tokens>& sentences, const LmOptions& options = {});

}  // namespace lexsmt

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lexsmt/corpus.hpp"
#include "lexsmt/text.hpp"

namespace lexsmt {

// Replaces a token ending with `surface_suffix` by stem + `emit`.
struct SuffixRule {
  std::string surface_suffix;
  Tokens emit;
  std::size_t min_stem_len = 1;  // in code points
};

// Declarative suffix splitter. Whole-token rewrites (lemmatizations such as
// "आहेत" -> "अस") live in a separate exact-match map consulted first; among
// suffix rules only the longest matching suffix is considered.
class SuffixTable {
 public:
  SuffixTable() = default;

  // Validates uniqueness, non-empty fields and terminality of every emitted
  // token. Throws ValidationError.
  SuffixTable(std::vector<SuffixRule> rules, std::map<std::string, Tokens> exact);

  // TSV: kind (suffix|exact), pattern, emit (space separated), min_stem_len.
  static SuffixTable load(const std::filesystem::path& file);

  Tokens split_token(std::string_view token) const;

  const std::vector<SuffixRule>& rules() const { return rules_; }
  const std::map<std::string, Tokens, std::less<>>& exact() const { return exact_; }

 private:
  std::vector<SuffixRule> rules_;  // longest suffix first
  std::map<std::string, std::size_t, std::less<>> by_suffix_;
  std::map<std::string, Tokens, std::less<>> exact_;
};

Tokens split_tokens(const Tokens& tokens, const SuffixTable& table);

ParallelCorpus split_corpus(const ParallelCorpus& corpus, const SuffixTable& table,
                            Side side);

}  // namespace lexsmt

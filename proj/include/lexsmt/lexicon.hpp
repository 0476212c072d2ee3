#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "lexsmt/corpus.hpp"
#include "lexsmt/text.hpp"

namespace lexsmt {

enum class Category { synset, function_word, kridanta, akhyat, suffix_pair, verb_phrase };

inline constexpr std::size_t kNumCategories = 6;

std::string_view to_string(Category category);
Category parse_category(std::string_view text);

struct SynsetRow {
  Tokens source_expr;
  std::vector<Tokens> target_exprs;
};

struct PairEntry {
  Tokens source_expr;
  Tokens target_expr;
  Category category = Category::synset;

  bool operator==(const PairEntry&) const = default;
};

// Bilingual entries, deduplicated on (source_expr, target_expr). The first
// occurrence of a pair decides its category.
class ResourceSet {
 public:
  // Returns false when the pair is already present. Throws ValidationError
  // when either side is empty.
  bool add(PairEntry entry);
  void merge(const ResourceSet& other);

  const std::vector<PairEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t count(Category category) const {
    return counts_[static_cast<std::size_t>(category)];
  }

  // Source and target exchanged on every entry.
  ResourceSet reversed() const;

  // Applies `fn` to one side of every entry, re-deduplicating.
  ResourceSet map_side(Side side, const std::function<Tokens(const Tokens&)>& fn) const;

 private:
  std::vector<PairEntry> entries_;
  std::unordered_set<std::string> seen_;
  std::array<std::size_t, kNumCategories> counts_{};
};

// One entry per distinct target expression, all sharing the source side.
std::vector<PairEntry> expand_synset_row(const SynsetRow& row);

// Synset file: source_expr<TAB>target1<TAB>target2...
ResourceSet load_synsets(const std::filesystem::path& file);

// TSV source<TAB>target, every line tagged with `category`.
ResourceSet load_pair_resource(const std::filesystem::path& file, Category category);

// Original pairs first and untouched, then one pair per resource entry,
// repeated `repeat` times.
ParallelCorpus augment_corpus(const ParallelCorpus& corpus, const ResourceSet& resources,
                              std::size_t repeat = 1);

}  // namespace lexsmt

#include "lexsmt/lexicon.hpp"

#include <algorithm>

#include "lexsmt/error.hpp"

namespace lexsmt {

namespace {

constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "synset", "function_word", "kridanta", "akhyat", "suffix_pair", "verb_phrase"};

std::string pair_key(const Tokens& source, const Tokens& target) {
  return join(source) + '\t' + join(target);
}

}  // namespace

std::string_view to_string(Category category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

Category parse_category(std::string_view text) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == text) return static_cast<Category>(i);
  }
  throw ParseError("unknown resource category '" + std::string(text) + "'");
}

bool ResourceSet::add(PairEntry entry) {
  if (entry.source_expr.empty() || entry.target_expr.empty()) {
    throw ValidationError("resource entry with an empty side");
  }
  if (!seen_.insert(pair_key(entry.source_expr, entry.target_expr)).second) return false;
  ++counts_[static_cast<std::size_t>(entry.category)];
  entries_.push_back(std::move(entry));
  return true;
}

void ResourceSet::merge(const ResourceSet& other) {
  for (const PairEntry& entry : other.entries_) add(entry);
}

ResourceSet ResourceSet::reversed() const {
  ResourceSet out;
  for (const PairEntry& e : entries_) out.add(PairEntry{e.target_expr, e.source_expr, e.category});
  return out;
}

ResourceSet ResourceSet::map_side(Side side,
                                  const std::function<Tokens(const Tokens&)>& fn) const {
  ResourceSet out;
  for (PairEntry e : entries_) {
    Tokens& expr = side == Side::source ? e.source_expr : e.target_expr;
    expr = fn(expr);
    out.add(std::move(e));
  }
  return out;
}

std::vector<PairEntry> expand_synset_row(const SynsetRow& row) {
  if (row.source_expr.empty()) throw ValidationError("synset row with empty source");
  if (row.target_exprs.empty()) {
    throw ValidationError("synset row '" + join(row.source_expr) + "' has no targets");
  }
  std::vector<PairEntry> out;
  std::unordered_set<std::string> seen;
  for (const Tokens& target : row.target_exprs) {
    if (target.empty()) throw ValidationError("synset row with an empty target");
    if (seen.insert(join(target)).second) {
      out.push_back(PairEntry{row.source_expr, target, Category::synset});
    }
  }
  return out;
}

ResourceSet load_synsets(const std::filesystem::path& file) {
  ResourceSet set;
  const std::vector<std::string> lines = read_lines(file);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = file.string() + ":" + std::to_string(i + 1);
    if (!is_valid_utf8(lines[i])) throw EncodingError(where + ": invalid UTF-8");
    std::vector<std::string> fields = split_fields(lines[i], '\t');
    if (fields.size() < 2) throw ParseError(where + ": synset row lacks a TAB separator");
    SynsetRow row;
    row.source_expr = normalize_tokens(fields[0]);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      Tokens target = normalize_tokens(fields[f]);
      if (!target.empty()) row.target_exprs.push_back(std::move(target));
    }
    try {
      for (PairEntry& entry : expand_synset_row(row)) set.add(std::move(entry));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return set;
}

ResourceSet load_pair_resource(const std::filesystem::path& file, Category category) {
  ResourceSet set;
  const std::vector<std::string> lines = read_lines(file);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = file.string() + ":" + std::to_string(i + 1);
    if (!is_valid_utf8(lines[i])) throw EncodingError(where + ": invalid UTF-8");
    std::vector<std::string> fields = split_fields(lines[i], '\t');
    if (fields.size() != 2) {
      throw ParseError(where + ": expected source<TAB>target");
    }
    PairEntry entry{normalize_tokens(fields[0]), normalize_tokens(fields[1]), category};
    if (entry.source_expr.empty() || entry.target_expr.empty()) {
      throw ParseError(where + ": empty side");
    }
    set.add(std::move(entry));
  }
  return set;
}

ParallelCorpus augment_corpus(const ParallelCorpus& corpus, const ResourceSet& resources,
                              std::size_t repeat) {
  ParallelCorpus out = corpus;
  out.pairs.reserve(corpus.size() + resources.size() * repeat);
  std::size_t next_id = 0;
  for (const SentencePair& p : corpus.pairs) next_id = std::max(next_id, p.id + 1);
  for (std::size_t r = 0; r < repeat; ++r) {
    for (const PairEntry& e : resources.entries()) {
      out.pairs.push_back(SentencePair{next_id++, e.source_expr, e.target_expr,
                                       "resource:" + std::string(to_string(e.category))});
    }
  }
  return out;
}

}  // namespace lexsmt

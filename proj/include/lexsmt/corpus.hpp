#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexsmt/text.hpp"

namespace lexsmt {

enum class Side { source, target };

Side parse_side(std::string_view text);

struct SentencePair {
  std::size_t id = 0;
  Tokens source;
  Tokens target;
  std::string origin;

  const Tokens& side(Side s) const { return s == Side::source ? source : target; }
  Tokens& side(Side s) { return s == Side::source ? source : target; }

  bool operator==(const SentencePair&) const = default;
};

struct ParallelCorpus {
  std::string name;
  std::string language_pair;
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }

  // Renumbers ids 0..n-1 in order.
  void reindex();

  std::vector<Tokens> sources() const;
  std::vector<Tokens> targets() const;

  bool operator==(const ParallelCorpus&) const = default;
};

// Pairs line i of `source_file` with line i of `target_file`.
ParallelCorpus ingest_parallel(const std::filesystem::path& source_file,
                               const std::filesystem::path& target_file,
                               const std::string& origin);

// Loads every corpus listed in a TSV manifest (origin, source_path,
// target_path) and concatenates them. Relative paths resolve against the
// manifest's directory.
ParallelCorpus ingest_manifest(const std::filesystem::path& manifest);

// Reads one tokenized sentence per line (NFC-normalized).
std::vector<Tokens> read_sentences(const std::filesystem::path& file);
void write_sentences(const std::vector<Tokens>& sentences,
                     const std::filesystem::path& file);

void write_corpus(const ParallelCorpus& corpus,
                  const std::filesystem::path& source_file,
                  const std::filesystem::path& target_file);

// Corpus directories hold `corpus.src` and `corpus.tgt`.
ParallelCorpus read_corpus_dir(const std::filesystem::path& dir,
                               const std::string& origin = "corpus");
void write_corpus_dir(const ParallelCorpus& corpus, const std::filesystem::path& dir);

// Exchanges source and target of every pair.
ParallelCorpus swap_sides(const ParallelCorpus& corpus);

struct PatchEntry {
  std::optional<Tokens> source;
  std::optional<Tokens> target;
};

class PatchSet {
 public:
  // TSV: id, side (src|tgt), replacement sentence.
  static PatchSet load(const std::filesystem::path& file);

  void set(std::size_t id, Side side, Tokens replacement);
  const std::map<std::size_t, PatchEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::size_t, PatchEntry> entries_;
};

struct CleanConfig {
  std::size_t max_length = 80;
  double max_ratio = 3.0;

  void validate() const;
};

struct CleanReport {
  std::size_t kept = 0;
  std::size_t dropped_empty = 0;
  std::size_t dropped_ratio = 0;
  std::size_t dropped_length = 0;
  std::size_t patched = 0;

  std::size_t input_size() const {
    return kept + dropped_empty + dropped_ratio + dropped_length;
  }
  std::string to_tsv() const;
};

struct CleanResult {
  ParallelCorpus corpus;
  CleanReport report;
};

// Applies patches, then drops pairs with an empty side, a side longer than
// max_length, or a token-count ratio above max_ratio. Survivors keep their
// order and are renumbered.
CleanResult clean_corpus(const ParallelCorpus& corpus, const PatchSet& patches,
                         const CleanConfig& config);

}  // namespace lexsmt

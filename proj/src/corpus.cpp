#include "lexsmt/corpus.hpp"

#include <algorithm>
#include <sstream>

#include "lexsmt/error.hpp"

namespace lexsmt {

namespace fs = std::filesystem;

namespace {

std::vector<Tokens> read_tokenized(const fs::path& file) {
  std::vector<Tokens> out;
  const std::vector<std::string> lines = read_lines(file);
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_valid_utf8(lines[i])) {
      throw EncodingError(file.string() + ": invalid UTF-8 at line " +
                          std::to_string(i + 1));
    }
    out.push_back(normalize_tokens(lines[i]));
  }
  return out;
}

}  // namespace

Side parse_side(std::string_view text) {
  if (text == "src" || text == "source") return Side::source;
  if (text == "tgt" || text == "target") return Side::target;
  throw ParseError("unknown side '" + std::string(text) + "' (expected src|tgt)");
}

void ParallelCorpus::reindex() {
  for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i].id = i;
}

std::vector<Tokens> ParallelCorpus::sources() const {
  std::vector<Tokens> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.source);
  return out;
}

std::vector<Tokens> ParallelCorpus::targets() const {
  std::vector<Tokens> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.target);
  return out;
}

ParallelCorpus ingest_parallel(const fs::path& source_file, const fs::path& target_file,
                               const std::string& origin) {
  std::vector<Tokens> sources = read_tokenized(source_file);
  std::vector<Tokens> targets = read_tokenized(target_file);
  if (sources.size() != targets.size()) {
    throw AlignmentError("line count mismatch: " + source_file.string() + " has " +
                         std::to_string(sources.size()) + " lines, " +
                         target_file.string() + " has " +
                         std::to_string(targets.size()));
  }
  ParallelCorpus corpus;
  corpus.name = origin;
  corpus.pairs.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    corpus.pairs.push_back(
        SentencePair{i, std::move(sources[i]), std::move(targets[i]), origin});
  }
  return corpus;
}

ParallelCorpus ingest_manifest(const fs::path& manifest) {
  const fs::path base = manifest.parent_path();
  const std::vector<std::string> lines = read_lines(manifest);
  ParallelCorpus combined;
  combined.name = manifest.stem().string();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields = split_fields(lines[i], '\t');
    if (fields.size() != 3) {
      throw ParseError(manifest.string() + ":" + std::to_string(i + 1) +
                       ": expected origin<TAB>source_path<TAB>target_path");
    }
    auto resolve = [&](const std::string& p) {
      fs::path path(std::string(trim(p)));
      return path.is_absolute() ? path : base / path;
    };
    ParallelCorpus part = ingest_parallel(resolve(fields[1]), resolve(fields[2]),
                                          std::string(trim(fields[0])));
    for (auto& pair : part.pairs) combined.pairs.push_back(std::move(pair));
  }
  combined.reindex();
  return combined;
}

std::vector<Tokens> read_sentences(const fs::path& file) { return read_tokenized(file); }

void write_sentences(const std::vector<Tokens>& sentences, const fs::path& file) {
  std::string content;
  for (const auto& s : sentences) {
    content += join(s);
    content += '\n';
  }
  write_file(file, content);
}

void write_corpus(const ParallelCorpus& corpus, const fs::path& source_file,
                  const fs::path& target_file) {
  write_sentences(corpus.sources(), source_file);
  write_sentences(corpus.targets(), target_file);
}

ParallelCorpus read_corpus_dir(const fs::path& dir, const std::string& origin) {
  return ingest_parallel(dir / "corpus.src", dir / "corpus.tgt", origin);
}

void write_corpus_dir(const ParallelCorpus& corpus, const fs::path& dir) {
  write_corpus(corpus, dir / "corpus.src", dir / "corpus.tgt");
}

ParallelCorpus swap_sides(const ParallelCorpus& corpus) {
  ParallelCorpus out = corpus;
  for (auto& p : out.pairs) std::swap(p.source, p.target);
  auto dash = corpus.language_pair.find('-');
  if (dash != std::string::npos) {
    out.language_pair =
        corpus.language_pair.substr(dash + 1) + "-" + corpus.language_pair.substr(0, dash);
  }
  return out;
}

PatchSet PatchSet::load(const fs::path& file) {
  PatchSet patches;
  const std::vector<std::string> lines = read_lines(file);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    const std::string where = file.string() + ":" + std::to_string(i + 1);
    if (!is_valid_utf8(lines[i])) throw EncodingError(where + ": invalid UTF-8");
    std::vector<std::string> fields = split_fields(lines[i], '\t');
    if (fields.size() != 3) {
      throw ParseError(where + ": expected id<TAB>side<TAB>replacement");
    }
    long long id = parse_int(fields[0], "patch id at " + where);
    if (id < 0) throw ParseError(where + ": negative patch id");
    patches.set(static_cast<std::size_t>(id), parse_side(trim(fields[1])),
                normalize_tokens(fields[2]));
  }
  return patches;
}

void PatchSet::set(std::size_t id, Side side, Tokens replacement) {
  PatchEntry& entry = entries_[id];
  if (side == Side::source) {
    entry.source = std::move(replacement);
  } else {
    entry.target = std::move(replacement);
  }
}

void CleanConfig::validate() const {
  if (max_length == 0) throw ContractError("max length must be positive");
  if (!(max_ratio > 0.0)) throw ContractError("max ratio must be positive");
}

std::string CleanReport::to_tsv() const {
  std::ostringstream out;
  out << "kept\t" << kept << "\n"
      << "dropped_empty\t" << dropped_empty << "\n"
      << "dropped_ratio\t" << dropped_ratio << "\n"
      << "dropped_length\t" << dropped_length << "\n"
      << "patched\t" << patched << "\n";
  return out.str();
}

CleanResult clean_corpus(const ParallelCorpus& corpus, const PatchSet& patches,
                         const CleanConfig& config) {
  config.validate();

  std::map<std::size_t, std::size_t> index_of;
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) index_of[corpus.pairs[i].id] = i;

  std::vector<std::size_t> unmatched;
  for (const auto& [id, entry] : patches.entries()) {
    if (!index_of.contains(id)) unmatched.push_back(id);
  }
  if (!unmatched.empty()) {
    std::string ids;
    for (std::size_t id : unmatched) {
      if (!ids.empty()) ids += ", ";
      ids += std::to_string(id);
    }
    throw PatchError("patch ids not present in corpus: " + ids);
  }

  CleanResult result;
  result.corpus.name = corpus.name;
  result.corpus.language_pair = corpus.language_pair;

  for (const SentencePair& original : corpus.pairs) {
    SentencePair pair = original;
    if (auto it = patches.entries().find(pair.id); it != patches.entries().end()) {
      if (it->second.source) pair.source = *it->second.source;
      if (it->second.target) pair.target = *it->second.target;
      ++result.report.patched;
    }
    const std::size_t ls = pair.source.size();
    const std::size_t lt = pair.target.size();
    if (ls == 0 || lt == 0) {
      ++result.report.dropped_empty;
    } else if (ls > config.max_length || lt > config.max_length) {
      ++result.report.dropped_length;
    } else if (static_cast<double>(std::max(ls, lt)) / static_cast<double>(std::min(ls, lt)) >
               config.max_ratio) {
      ++result.report.dropped_ratio;
    } else {
      ++result.report.kept;
      result.corpus.pairs.push_back(std::move(pair));
    }
  }
  result.corpus.reindex();
  return result;
}

}  // namespace lexsmt

#include "lexsmt/phrase.hpp"

#include <algorithm>
#include <limits>

#include "lexsmt/error.hpp"

namespace lexsmt {

std::vector<PhrasePair> extract_phrases(const SentencePair& pair, const AlignmentSet& alignment,
                                        int max_phrase_len) {
  if (max_phrase_len < 1) throw ContractError("max_phrase_len must be >= 1");
  const int source_len = static_cast<int>(pair.source.size());
  const int target_len = static_cast<int>(pair.target.size());
  if (alignment.source_length() != pair.source.size() ||
      alignment.target_length() != pair.target.size()) {
    throw ContractError("alignment shape does not match sentence pair " +
                        std::to_string(pair.id));
  }

  std::vector<std::vector<int>> targets_of(source_len);
  std::vector<int> source_links_of_target(target_len, 0);
  for (const Link& l : alignment.links()) {
    targets_of[l.source].push_back(l.target);
    ++source_links_of_target[l.target];
  }
  auto target_aligned = [&](int t) { return source_links_of_target[t] > 0; };

  std::vector<PhrasePair> out;
  for (int s_start = 0; s_start < source_len; ++s_start) {
    for (int s_end = s_start; s_end < std::min(source_len, s_start + max_phrase_len); ++s_end) {
      int t_min = std::numeric_limits<int>::max();
      int t_max = -1;
      for (int s = s_start; s <= s_end; ++s) {
        for (int t : targets_of[s]) {
          t_min = std::min(t_min, t);
          t_max = std::max(t_max, t);
        }
      }
      if (t_max < 0) continue;
      if (t_max - t_min + 1 > max_phrase_len) continue;

      bool consistent = true;
      for (const Link& l : alignment.links()) {
        if (l.target >= t_min && l.target <= t_max &&
            (l.source < s_start || l.source > s_end)) {
          consistent = false;
          break;
        }
      }
      if (!consistent) continue;

      for (int t_start = t_min; t_start >= 0; --t_start) {
        if (t_start < t_min && target_aligned(t_start)) break;
        for (int t_end = t_max; t_end < target_len; ++t_end) {
          if (t_end > t_max && target_aligned(t_end)) break;
          if (t_end - t_start + 1 > max_phrase_len) break;
          PhrasePair phrase;
          phrase.source_start = s_start;
          phrase.source_end = s_end + 1;
          phrase.target_start = t_start;
          phrase.target_end = t_end + 1;
          phrase.source.assign(pair.source.begin() + s_start, pair.source.begin() + s_end + 1);
          phrase.target.assign(pair.target.begin() + t_start, pair.target.begin() + t_end + 1);
          for (const Link& l : alignment.links()) {
            if (l.source >= s_start && l.source <= s_end && l.target >= t_start &&
                l.target <= t_end) {
              phrase.links.push_back(Link{l.source - s_start, l.target - t_start});
            }
          }
          out.push_back(std::move(phrase));
        }
      }
    }
  }
  return out;
}

std::vector<PhrasePair> extract_corpus(const ParallelCorpus& corpus,
                                       const std::vector<AlignmentSet>& alignments,
                                       int max_phrase_len) {
  if (alignments.size() != corpus.size()) {
    throw ContractError("extract_corpus: " + std::to_string(alignments.size()) +
                        " alignments for " + std::to_string(corpus.size()) + " pairs");
  }
  std::vector<PhrasePair> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::vector<PhrasePair> part = extract_phrases(corpus.pairs[i], alignments[i], max_phrase_len);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

void PhraseTable::add(const Tokens& source, PhraseEntry entry) {
  auto& entries = records_[source];
  auto it = std::lower_bound(entries.begin(), entries.end(), entry.target,
                             [](const PhraseEntry& e, const Tokens& t) { return e.target < t; });
  if (it != entries.end() && it->target == entry.target) {
    *it = std::move(entry);
    return;
  }
  entries.insert(it, std::move(entry));
  ++size_;
  max_source_length_ = std::max(max_source_length_, source.size());
  for (const auto& w : source) source_words_.insert(w);
}

const std::vector<PhraseEntry>* PhraseTable::lookup(const Tokens& source) const {
  auto it = records_.find(source);
  return it == records_.end() ? nullptr : &it->second;
}

std::string PhraseTable::dump() const {
  std::string out;
  for (const auto& [source, entries] : records_) {
    for (const PhraseEntry& e : entries) {
      out += join(source);
      out += " ||| ";
      out += join(e.target);
      out += " ||| ";
      out += format_double(e.scores.p_target_given_source);
      out += ' ';
      out += format_double(e.scores.p_source_given_target);
      out += ' ';
      out += format_double(e.scores.lex_target_given_source);
      out += ' ';
      out += format_double(e.scores.lex_source_given_target);
      out += '\n';
    }
  }
  return out;
}

void PhraseTable::write(const std::filesystem::path& file) const { write_file(file, dump()); }

PhraseTable PhraseTable::load(const std::filesystem::path& file) {
  PhraseTable table;
  const std::vector<std::string> lines = read_lines(file);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = file.string() + ":" + std::to_string(i + 1);
    std::vector<std::string> fields;
    std::string_view rest = lines[i];
    while (true) {
      auto pos = rest.find(" ||| ");
      if (pos == std::string_view::npos) {
        fields.emplace_back(rest);
        break;
      }
      fields.emplace_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 5);
    }
    if (fields.size() != 3) throw ParseError(where + ": expected 3 ' ||| ' separated fields");
    Tokens scores = split_spaces(fields[2]);
    if (scores.size() != 4) throw ParseError(where + ": expected 4 scores");
    PhraseEntry entry;
    entry.target = split_spaces(fields[1]);
    entry.scores.p_target_given_source = parse_double(scores[0], "p(t|s) at " + where);
    entry.scores.p_source_given_target = parse_double(scores[1], "p(s|t) at " + where);
    entry.scores.lex_target_given_source = parse_double(scores[2], "lex(t|s) at " + where);
    entry.scores.lex_source_given_target = parse_double(scores[3], "lex(s|t) at " + where);
    Tokens source = split_spaces(fields[0]);
    if (source.empty() || entry.target.empty()) throw ParseError(where + ": empty phrase");
    table.add(source, std::move(entry));
  }
  return table;
}

namespace {

// Product over `target` words of the mean t(target | aligned source), NULL
// for unaligned target words. Links are (source, target) in phrase space.
double lexical_weight(const Tokens& source, const Tokens& target, const std::vector<Link>& links,
                      const TranslationTable& table) {
  double weight = 1.0;
  for (std::size_t t = 0; t < target.size(); ++t) {
    double sum = 0.0;
    int aligned = 0;
    for (const Link& l : links) {
      if (l.target == static_cast<int>(t)) {
        sum += table.prob(source[l.source], target[t]);
        ++aligned;
      }
    }
    weight *= aligned > 0 ? sum / aligned : table.null_prob(target[t]);
  }
  return weight;
}

}  // namespace

PhraseTable score_phrase_table(const std::vector<PhrasePair>& extracted,
                               const TranslationTable& forward,
                               const TranslationTable& backward, const ScoreOptions& options) {
  struct Accumulator {
    std::uint32_t count = 0;
    std::map<std::vector<Link>, std::uint32_t> alignments;
  };
  std::map<std::pair<Tokens, Tokens>, Accumulator> pairs;
  for (const PhrasePair& p : extracted) {
    Accumulator& acc = pairs[{p.source, p.target}];
    ++acc.count;
    ++acc.alignments[p.links];
  }

  std::map<Tokens, std::uint64_t> source_counts;
  std::map<Tokens, std::uint64_t> target_counts;
  for (const auto& [key, acc] : pairs) {
    if (acc.count < options.min_count) continue;
    source_counts[key.first] += acc.count;
    target_counts[key.second] += acc.count;
  }

  PhraseTable table;
  for (const auto& [key, acc] : pairs) {
    if (acc.count < options.min_count) continue;
    const auto& [source, target] = key;
    const std::vector<Link>* best = nullptr;
    std::uint32_t best_count = 0;
    for (const auto& [links, n] : acc.alignments) {
      if (n > best_count) {
        best = &links;
        best_count = n;
      }
    }
    std::vector<Link> inverse;
    inverse.reserve(best->size());
    for (const Link& l : *best) inverse.push_back(Link{l.target, l.source});

    PhraseEntry entry;
    entry.target = target;
    entry.count = acc.count;
    entry.scores.p_target_given_source =
        static_cast<double>(acc.count) / static_cast<double>(source_counts[source]);
    entry.scores.p_source_given_target =
        static_cast<double>(acc.count) / static_cast<double>(target_counts[target]);
    entry.scores.lex_target_given_source = lexical_weight(source, target, *best, forward);
    entry.scores.lex_source_given_target = lexical_weight(target, source, inverse, backward);
    table.add(source, std::move(entry));
  }
  return table;
}

}  // namespace lexsmt

#include "lexsmt/align.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "lexsmt/error.hpp"

namespace lexsmt {

namespace {

constexpr std::size_t kChunkSize = 256;

struct EncodedPair {
  std::vector<WordId> source;  // NULL first
  std::vector<WordId> target;
};

struct ChunkCounts {
  std::unordered_map<std::uint64_t, double> counts;
  double log_likelihood = 0.0;
};

std::uint64_t pack(WordId s, WordId t) { return (static_cast<std::uint64_t>(s) << 32) | t; }

ChunkCounts expectation(const std::vector<EncodedPair>& pairs, std::size_t begin,
                        std::size_t end, const TranslationTable& table) {
  ChunkCounts out;
  std::vector<double> probs;
  for (std::size_t k = begin; k < end; ++k) {
    const EncodedPair& pair = pairs[k];
    const double norm = static_cast<double>(pair.source.size());
    probs.resize(pair.source.size());
    for (WordId t : pair.target) {
      double denom = 0.0;
      for (std::size_t i = 0; i < pair.source.size(); ++i) {
        probs[i] = table.prob(pair.source[i], t);
        denom += probs[i];
      }
      out.log_likelihood += std::log(denom / norm);
      for (std::size_t i = 0; i < pair.source.size(); ++i) {
        out.counts[pack(pair.source[i], t)] += probs[i] / denom;
      }
    }
  }
  return out;
}

}  // namespace

WordId Vocabulary::intern(const std::string& word) {
  auto [it, inserted] = ids_.emplace(word, static_cast<WordId>(words_.size()));
  if (inserted) words_.push_back(word);
  return it->second;
}

std::optional<WordId> Vocabulary::find(const std::string& word) const {
  auto it = ids_.find(word);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TranslationTable::TranslationTable(double floor) : floor_(floor) {
  source_vocab_.intern(kNullWord);
  rows_.emplace_back();
}

double TranslationTable::prob(WordId source, WordId target) const {
  if (source >= rows_.size()) return floor_;
  const auto& row = rows_[source];
  auto it = row.find(target);
  return it == row.end() ? floor_ : it->second;
}

double TranslationTable::prob(const std::string& source, const std::string& target) const {
  auto s = source_vocab_.find(source);
  auto t = target_vocab_.find(target);
  if (!s || !t) return floor_;
  return prob(*s, *t);
}

double TranslationTable::null_prob(const std::string& target) const {
  auto t = target_vocab_.find(target);
  return t ? prob(kNull, *t) : floor_;
}

void TranslationTable::set(WordId source, WordId target, double p) {
  if (source >= rows_.size()) rows_.resize(source + 1);
  rows_[source][target] = p;
}

const std::unordered_map<WordId, double>& TranslationTable::row(WordId source) const {
  static const std::unordered_map<WordId, double> kEmpty;
  return source < rows_.size() ? rows_[source] : kEmpty;
}

double TranslationTable::row_sum(WordId source) const {
  double sum = 0.0;
  for (const auto& [t, p] : row(source)) sum += p;
  return sum;
}

std::string TranslationTable::dump() const {
  std::vector<std::tuple<const std::string*, const std::string*, double>> records;
  for (WordId s = 0; s < rows_.size(); ++s) {
    for (const auto& [t, p] : rows_[s]) {
      records.emplace_back(&source_vocab_.word(s), &target_vocab_.word(t), p);
    }
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    if (*std::get<0>(a) != *std::get<0>(b)) return *std::get<0>(a) < *std::get<0>(b);
    return *std::get<1>(a) < *std::get<1>(b);
  });
  std::string out;
  for (const auto& [s, t, p] : records) {
    out += *s;
    out += '\t';
    out += *t;
    out += '\t';
    out += format_double(p);
    out += '\n';
  }
  return out;
}

void TranslationTable::write(const std::filesystem::path& file) const { write_file(file, dump()); }

TranslationTable TranslationTable::load(const std::filesystem::path& file, double floor) {
  TranslationTable table(floor);
  const std::vector<std::string> lines = read_lines(file);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> fields = split_fields(lines[i], '\t');
    const std::string where = file.string() + ":" + std::to_string(i + 1);
    if (fields.size() != 3) throw ParseError(where + ": expected source<TAB>target<TAB>prob");
    WordId s = table.source_vocab_.intern(fields[0]);
    WordId t = table.target_vocab_.intern(fields[1]);
    table.set(s, t, parse_double(fields[2], "probability at " + where));
  }
  return table;
}

Model1Result train_model1(const ParallelCorpus& corpus, const Model1Options& options) {
  if (corpus.empty()) throw TrainingError("cannot train Model 1 on an empty corpus");
  if (options.iterations < 1) throw TrainingError("Model 1 needs at least one iteration");

  Model1Result result{TranslationTable(options.floor), {}};
  TranslationTable& table = result.table;

  std::vector<EncodedPair> pairs;
  pairs.reserve(corpus.size());
  for (const SentencePair& p : corpus.pairs) {
    EncodedPair e;
    e.source.push_back(TranslationTable::kNull);
    for (const auto& w : p.source) e.source.push_back(table.source_vocab().intern(w));
    for (const auto& w : p.target) e.target.push_back(table.target_vocab().intern(w));
    pairs.push_back(std::move(e));
  }

  // Uniform over co-occurring target words.
  {
    std::vector<std::unordered_map<WordId, double>> cooc(table.source_vocab().size());
    for (const EncodedPair& p : pairs) {
      for (WordId s : p.source) {
        for (WordId t : p.target) cooc[s][t] = 1.0;
      }
    }
    for (WordId s = 0; s < cooc.size(); ++s) {
      const double uniform = cooc[s].empty() ? 0.0 : 1.0 / static_cast<double>(cooc[s].size());
      for (const auto& [t, one] : cooc[s]) table.set(s, t, uniform);
    }
  }

  const std::size_t num_chunks = (pairs.size() + kChunkSize - 1) / kChunkSize;
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads,
                                                          static_cast<unsigned>(num_chunks)));

  auto run_estep = [&]() {
    std::vector<ChunkCounts> chunks(num_chunks);
    auto work = [&](unsigned worker) {
      for (std::size_t c = worker; c < num_chunks; c += threads) {
        chunks[c] = expectation(pairs, c * kChunkSize,
                                std::min(pairs.size(), (c + 1) * kChunkSize), table);
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    return chunks;
  };

  for (int iteration = 0; iteration < options.iterations; ++iteration) {
    std::vector<ChunkCounts> chunks = run_estep();

    double log_likelihood = 0.0;
    std::vector<std::unordered_map<WordId, double>> counts(table.source_vocab().size());
    for (const ChunkCounts& chunk : chunks) {
      log_likelihood += chunk.log_likelihood;
      // Sorted keys give a fixed accumulation order.
      std::vector<std::pair<std::uint64_t, double>> sorted(chunk.counts.begin(),
                                                           chunk.counts.end());
      std::sort(sorted.begin(), sorted.end());
      for (const auto& [key, value] : sorted) {
        counts[static_cast<WordId>(key >> 32)][static_cast<WordId>(key & 0xffffffffu)] += value;
      }
    }
    result.log_likelihood.push_back(log_likelihood);

    for (WordId s = 0; s < counts.size(); ++s) {
      std::vector<std::pair<WordId, double>> row(counts[s].begin(), counts[s].end());
      std::sort(row.begin(), row.end());
      double total = 0.0;
      for (const auto& [t, c] : row) total += c;
      if (total <= 0.0) continue;
      for (const auto& [t, c] : row) table.set(s, t, c / total);
    }
  }

  double final_ll = 0.0;
  for (const ChunkCounts& chunk : run_estep()) final_ll += chunk.log_likelihood;
  result.log_likelihood.push_back(final_ll);
  return result;
}

AlignmentSet::AlignmentSet(std::size_t source_length, std::size_t target_length)
    : source_length_(source_length),
      target_length_(target_length),
      grid_(source_length * target_length, 0) {}

void AlignmentSet::add(int source, int target) {
  if (source < 0 || target < 0 || static_cast<std::size_t>(source) >= source_length_ ||
      static_cast<std::size_t>(target) >= target_length_) {
    throw ContractError("alignment link " + std::to_string(source) + "-" +
                        std::to_string(target) + " outside a " +
                        std::to_string(source_length_) + "x" +
                        std::to_string(target_length_) + " sentence pair");
  }
  char& cell = grid_[static_cast<std::size_t>(source) * target_length_ + target];
  if (cell) return;
  cell = 1;
  Link link{source, target};
  links_.insert(std::lower_bound(links_.begin(), links_.end(), link), link);
}

bool AlignmentSet::contains(int source, int target) const {
  if (source < 0 || target < 0 || static_cast<std::size_t>(source) >= source_length_ ||
      static_cast<std::size_t>(target) >= target_length_) {
    return false;
  }
  return grid_[static_cast<std::size_t>(source) * target_length_ + target] != 0;
}

AlignmentSet AlignmentSet::transposed() const {
  AlignmentSet out(target_length_, source_length_);
  for (const Link& l : links_) out.add(l.target, l.source);
  return out;
}

std::string AlignmentSet::to_string() const {
  std::string out;
  for (const Link& l : links_) {
    if (!out.empty()) out += ' ';
    out += std::to_string(l.source) + "-" + std::to_string(l.target);
  }
  return out;
}

AlignmentSet AlignmentSet::parse(std::string_view text, std::size_t source_length,
                                 std::size_t target_length) {
  AlignmentSet out(source_length, target_length);
  for (const std::string& item : split_spaces(text)) {
    auto dash = item.find('-');
    if (dash == std::string::npos) throw ParseError("bad alignment link '" + item + "'");
    out.add(static_cast<int>(parse_int(item.substr(0, dash), "alignment source")),
            static_cast<int>(parse_int(item.substr(dash + 1), "alignment target")));
  }
  return out;
}

AlignmentSet viterbi_align(const SentencePair& pair, const TranslationTable& table) {
  AlignmentSet out(pair.source.size(), pair.target.size());
  std::vector<std::optional<WordId>> source_ids;
  source_ids.reserve(pair.source.size());
  for (const auto& w : pair.source) source_ids.push_back(table.source_vocab().find(w));

  for (std::size_t j = 0; j < pair.target.size(); ++j) {
    const auto target_id = table.target_vocab().find(pair.target[j]);
    auto lookup = [&](std::optional<WordId> s) {
      return (s && target_id) ? table.prob(*s, *target_id) : table.floor();
    };
    int best = -1;
    double best_p = -1.0;
    for (std::size_t i = 0; i < pair.source.size(); ++i) {
      const double p = lookup(source_ids[i]);
      if (p > best_p) {
        best_p = p;
        best = static_cast<int>(i);
      }
    }
    if (lookup(TranslationTable::kNull) > best_p) best = -1;
    if (best >= 0) out.add(best, static_cast<int>(j));
  }
  return out;
}

Heuristic parse_heuristic(std::string_view text) {
  if (text == "intersection") return Heuristic::intersection;
  if (text == "union") return Heuristic::union_;
  if (text == "grow-diag-final-and") return Heuristic::grow_diag_final_and;
  throw ParseError("unknown symmetrization heuristic '" + std::string(text) + "'");
}

AlignmentSet symmetrize(const AlignmentSet& forward, const AlignmentSet& backward,
                        Heuristic heuristic) {
  if (forward.source_length() != backward.source_length() ||
      forward.target_length() != backward.target_length()) {
    throw ContractError("symmetrize: alignments cover different sentence shapes (" +
                        std::to_string(forward.source_length()) + "x" +
                        std::to_string(forward.target_length()) + " vs " +
                        std::to_string(backward.source_length()) + "x" +
                        std::to_string(backward.target_length()) + ")");
  }
  const int rows = static_cast<int>(forward.source_length());
  const int cols = static_cast<int>(forward.target_length());

  AlignmentSet intersection(rows, cols);
  AlignmentSet union_set(rows, cols);
  for (const Link& l : forward.links()) {
    union_set.add(l.source, l.target);
    if (backward.contains(l.source, l.target)) intersection.add(l.source, l.target);
  }
  for (const Link& l : backward.links()) union_set.add(l.source, l.target);

  if (heuristic == Heuristic::intersection) return intersection;
  if (heuristic == Heuristic::union_) return union_set;

  AlignmentSet result = intersection;
  std::vector<char> source_aligned(rows, 0), target_aligned(cols, 0);
  for (const Link& l : result.links()) {
    source_aligned[l.source] = 1;
    target_aligned[l.target] = 1;
  }
  auto add = [&](int s, int t) {
    result.add(s, t);
    source_aligned[s] = 1;
    target_aligned[t] = 1;
  };

  static constexpr int kNeighbors[8][2] = {{-1, 0}, {0, -1}, {1, 0},  {0, 1},
                                           {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  bool grew = true;
  while (grew) {
    grew = false;
    for (int s = 0; s < rows; ++s) {
      for (int t = 0; t < cols; ++t) {
        if (!result.contains(s, t)) continue;
        for (const auto& d : kNeighbors) {
          const int ns = s + d[0];
          const int nt = t + d[1];
          if (ns < 0 || nt < 0 || ns >= rows || nt >= cols) continue;
          if ((!source_aligned[ns] || !target_aligned[nt]) && union_set.contains(ns, nt) &&
              !result.contains(ns, nt)) {
            add(ns, nt);
            grew = true;
          }
        }
      }
    }
  }

  for (const AlignmentSet* direction : {&forward, &backward}) {
    for (const Link& l : direction->links()) {
      if (!source_aligned[l.source] && !target_aligned[l.target]) add(l.source, l.target);
    }
  }
  return result;
}

std::vector<AlignmentSet> align_corpus(const ParallelCorpus& corpus,
                                       const TranslationTable& forward,
                                       const TranslationTable& backward, Heuristic heuristic) {
  std::vector<AlignmentSet> out;
  out.reserve(corpus.size());
  for (const SentencePair& pair : corpus.pairs) {
    SentencePair swapped{pair.id, pair.target, pair.source, pair.origin};
    AlignmentSet fwd = viterbi_align(pair, forward);
    AlignmentSet bwd = viterbi_align(swapped, backward).transposed();
    out.push_back(symmetrize(fwd, bwd, heuristic));
  }
  return out;
}

void write_alignments(const std::vector<AlignmentSet>& alignments,
                      const std::filesystem::path& file) {
  std::string content;
  for (const auto& a : alignments) {
    content += a.to_string();
    content += '\n';
  }
  write_file(file, content);
}

}  // namespace lexsmt

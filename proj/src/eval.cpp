#include "lexsmt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "lexsmt/error.hpp"

namespace lexsmt {

namespace {

void check_order(int max_n) {
  if (max_n < 1 || max_n > kMaxNgramOrder) {
    throw ContractError("BLEU order must be in [1, " + std::to_string(kMaxNgramOrder) +
                        "], got " + std::to_string(max_n));
  }
}

std::map<Tokens, std::size_t> ngram_counts(const Tokens& tokens, int n) {
  std::map<Tokens, std::size_t> counts;
  const auto size = static_cast<int>(tokens.size());
  for (int i = 0; i + n <= size; ++i) {
    ++counts[Tokens(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

double bleu_impl(const BleuStats& stats, int max_n, bool smooth, std::vector<double>* precisions,
                 double* brevity) {
  check_order(max_n);
  if (brevity != nullptr) *brevity = 0.0;
  if (stats.hyp_length == 0) return 0.0;
  double log_sum = 0.0;
  int used = 0;
  for (int n = 0; n < max_n; ++n) {
    double matches = static_cast<double>(stats.matches[n]);
    double totals = static_cast<double>(stats.totals[n]);
    if (smooth && n > 0) {
      matches += 1.0;
      totals += 1.0;
    }
    if (totals == 0.0) continue;
    const double p = matches / totals;
    if (precisions != nullptr) precisions->push_back(p);
    if (p == 0.0) return 0.0;
    log_sum += std::log(p);
    ++used;
  }
  if (used == 0) return 0.0;
  const double c = static_cast<double>(stats.hyp_length);
  const double r = static_cast<double>(stats.ref_length);
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  if (brevity != nullptr) *brevity = bp;
  return 100.0 * bp * std::exp(log_sum / used);
}

void check_parallel(std::size_t hyps, std::size_t refs) {
  if (hyps != refs) {
    throw ContractError("hypothesis count " + std::to_string(hyps) +
                        " does not match reference count " + std::to_string(refs));
  }
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int n = 0; n < kMaxNgramOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

BleuStats& BleuStats::operator-=(const BleuStats& other) {
  for (int n = 0; n < kMaxNgramOrder; ++n) {
    matches[n] -= other.matches[n];
    totals[n] -= other.totals[n];
  }
  hyp_length -= other.hyp_length;
  ref_length -= other.ref_length;
  return *this;
}

BleuStats bleu_stats(const Tokens& hyp, const Tokens& ref, int max_n) {
  check_order(max_n);
  BleuStats stats;
  stats.hyp_length = hyp.size();
  stats.ref_length = ref.size();
  for (int n = 1; n <= max_n; ++n) {
    const auto hyp_counts = ngram_counts(hyp, n);
    const auto ref_counts = ngram_counts(ref, n);
    std::size_t matched = 0;
    std::size_t total = 0;
    for (const auto& [gram, count] : hyp_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    stats.matches[n - 1] = matched;
    stats.totals[n - 1] = total;
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats, int max_n) {
  return bleu_impl(stats, max_n, false, nullptr, nullptr);
}

double smoothed_bleu_from_stats(const BleuStats& stats, int max_n) {
  return bleu_impl(stats, max_n, true, nullptr, nullptr);
}

BleuResult bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references,
                int max_n) {
  check_parallel(hypotheses.size(), references.size());
  BleuResult result;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    result.stats += bleu_stats(hypotheses[i], references[i], max_n);
  }
  result.score = bleu_impl(result.stats, max_n, false, &result.precisions, &result.brevity_penalty);
  return result;
}

double sentence_bleu(const Tokens& hyp, const Tokens& ref, int max_n) {
  return smoothed_bleu_from_stats(bleu_stats(hyp, ref, max_n), max_n);
}

SynonymIndex::SynonymIndex(const ResourceSet& resources) {
  std::map<Tokens, std::vector<std::string>> siblings;
  for (const auto& entry : resources.entries()) {
    if (entry.target_expr.size() != 1) continue;
    if (entry.source_expr.size() == 1) link(entry.source_expr[0], entry.target_expr[0]);
    siblings[entry.source_expr].push_back(entry.target_expr[0]);
  }
  for (const auto& [source, targets] : siblings) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      for (std::size_t j = i + 1; j < targets.size(); ++j) link(targets[i], targets[j]);
    }
  }
}

void SynonymIndex::link(const std::string& a, const std::string& b) {
  if (a == b) return;
  neighbors_[a].insert(b);
  neighbors_[b].insert(a);
}

bool SynonymIndex::synonyms(const std::string& a, const std::string& b) const {
  auto it = neighbors_.find(a);
  return it != neighbors_.end() && it->second.contains(b);
}

MeteorStats& MeteorStats::operator+=(const MeteorStats& other) {
  matches += other.matches;
  chunks += other.chunks;
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

MeteorStats meteor_stats(const Tokens& hyp, const Tokens& ref, const SynonymIndex* synonyms) {
  MeteorStats stats;
  stats.hyp_length = hyp.size();
  stats.ref_length = ref.size();
  std::vector<int> hyp_to_ref(hyp.size(), -1);
  std::vector<bool> ref_used(ref.size(), false);

  auto stage = [&](auto&& same) {
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (hyp_to_ref[i] >= 0) continue;
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (!ref_used[j] && same(hyp[i], ref[j])) {
          hyp_to_ref[i] = static_cast<int>(j);
          ref_used[j] = true;
          break;
        }
      }
    }
  };
  stage([](const std::string& a, const std::string& b) { return a == b; });
  if (synonyms != nullptr && !synonyms->empty()) {
    stage([synonyms](const std::string& a, const std::string& b) {
      return synonyms->synonyms(a, b);
    });
  }

  int prev_hyp = -2;
  int prev_ref = -2;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    const int j = hyp_to_ref[i];
    if (j < 0) continue;
    ++stats.matches;
    if (static_cast<int>(i) != prev_hyp + 1 || j != prev_ref + 1) ++stats.chunks;
    prev_hyp = static_cast<int>(i);
    prev_ref = j;
  }
  return stats;
}

double meteor_from_stats(const MeteorStats& stats, const MeteorParams& params) {
  if (stats.matches == 0) return 0.0;
  const double m = static_cast<double>(stats.matches);
  const double precision = m / static_cast<double>(stats.hyp_length);
  const double recall = m / static_cast<double>(stats.ref_length);
  const double fmean =
      precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
  const double penalty =
      params.gamma * std::pow(static_cast<double>(stats.chunks) / m, params.beta);
  return fmean * (1.0 - penalty);
}

double meteor_lite(const Tokens& hyp, const Tokens& ref, const ResourceSet* synonyms,
                   const MeteorParams& params) {
  if (synonyms == nullptr) return meteor_from_stats(meteor_stats(hyp, ref, nullptr), params);
  const SynonymIndex index(*synonyms);
  return meteor_from_stats(meteor_stats(hyp, ref, &index), params);
}

TerStats& TerStats::operator+=(const TerStats& other) {
  edits += other.edits;
  shifts += other.shifts;
  ref_length += other.ref_length;
  return *this;
}

std::size_t edit_distance(const Tokens& hyp, const Tokens& ref) {
  std::vector<std::size_t> prev(ref.size() + 1);
  std::vector<std::size_t> cur(ref.size() + 1);
  for (std::size_t j = 0; j <= ref.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[ref.size()];
}

namespace {

bool block_at(const Tokens& ref, std::size_t j, const Tokens& words, std::size_t start,
              std::size_t len) {
  if (j + len > ref.size()) return false;
  for (std::size_t k = 0; k < len; ++k) {
    if (ref[j + k] != words[start + k]) return false;
  }
  return true;
}

}  // namespace

TerStats ter_stats(const Tokens& hyp, const Tokens& ref, const TerOptions& options) {
  if (ref.empty()) throw ContractError("TER needs a non-empty reference");
  TerStats stats;
  stats.ref_length = ref.size();
  Tokens current = hyp;
  std::size_t distance = edit_distance(current, ref);

  while (options.shifts && distance > 0) {
    // Candidate destinations put the block right after the word that precedes
    // it in the reference, or right before the word that follows it.
    std::size_t best_distance = distance;
    Tokens best;
    const std::size_t n = current.size();
    const std::size_t longest = std::min(options.max_shift_span, n);
    for (std::size_t len = longest; len >= 1; --len) {
      for (std::size_t start = 0; start + len <= n; ++start) {
        Tokens rest;
        rest.reserve(n - len);
        rest.insert(rest.end(), current.begin(), current.begin() + start);
        rest.insert(rest.end(), current.begin() + start + len, current.end());
        std::vector<std::size_t> targets;
        for (std::size_t j = 0; j + len <= ref.size(); ++j) {
          if (!block_at(ref, j, current, start, len)) continue;
          for (std::size_t p = 0; p <= rest.size(); ++p) {
            if (p == start) continue;
            const bool after = j == 0 ? p == 0 : (p > 0 && rest[p - 1] == ref[j - 1]);
            const bool before = j + len == ref.size()
                                    ? p == rest.size()
                                    : (p < rest.size() && rest[p] == ref[j + len]);
            if (after || before) targets.push_back(p);
          }
        }
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        for (std::size_t p : targets) {
          Tokens moved(rest.begin(), rest.begin() + p);
          moved.insert(moved.end(), current.begin() + start, current.begin() + start + len);
          moved.insert(moved.end(), rest.begin() + p, rest.end());
          const std::size_t d = edit_distance(moved, ref);
          if (d < best_distance) {
            best_distance = d;
            best = std::move(moved);
          }
        }
      }
    }
    if (best_distance + 1 > distance) break;
    current = std::move(best);
    distance = best_distance;
    ++stats.shifts;
  }
  stats.edits = distance;
  return stats;
}

double ter_from_stats(const TerStats& stats) {
  if (stats.ref_length == 0) throw ContractError("TER needs a non-empty reference");
  return 100.0 * static_cast<double>(stats.edits + stats.shifts) /
         static_cast<double>(stats.ref_length);
}

double ter(const Tokens& hyp, const Tokens& ref, const TerOptions& options) {
  return ter_from_stats(ter_stats(hyp, ref, options));
}

EvalScores evaluate(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references,
                    const SynonymIndex* synonyms) {
  check_parallel(hypotheses.size(), references.size());
  EvalScores scores;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    scores.bleu_stats += bleu_stats(hypotheses[i], references[i]);
    scores.meteor_stats += meteor_stats(hypotheses[i], references[i], synonyms);
    scores.ter_stats += ter_stats(hypotheses[i], references[i]);
  }
  scores.bleu = bleu_from_stats(scores.bleu_stats);
  scores.meteor = meteor_from_stats(scores.meteor_stats);
  scores.ter = scores.ter_stats.ref_length == 0 ? 0.0 : ter_from_stats(scores.ter_stats);
  return scores;
}

BootstrapInterval bootstrap_bleu(const std::vector<Tokens>& hypotheses,
                                 const std::vector<Tokens>& references, std::size_t samples,
                                 std::uint64_t seed, double confidence) {
  check_parallel(hypotheses.size(), references.size());
  if (hypotheses.empty() || samples == 0) throw ContractError("bootstrap needs data and samples");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ContractError("confidence must be in (0, 1)");
  }
  std::vector<BleuStats> per_sentence;
  per_sentence.reserve(hypotheses.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    per_sentence.push_back(bleu_stats(hypotheses[i], references[i]));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, per_sentence.size() - 1);
  std::vector<double> values;
  values.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    BleuStats total;
    for (std::size_t i = 0; i < per_sentence.size(); ++i) total += per_sentence[pick(rng)];
    values.push_back(bleu_from_stats(total));
  }
  std::sort(values.begin(), values.end());
  const double tail = (1.0 - confidence) / 2.0;
  auto at = [&](double q) {
    auto index = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
    return values[std::min(index, values.size() - 1)];
  };
  return {at(tail), at(1.0 - tail)};
}

SubjectiveSummary aggregate_subjective(const std::vector<SubjectiveRating>& ratings) {
  if (ratings.empty()) throw ContractError("no subjective ratings");
  double adequacy = 0.0;
  double fluency = 0.0;
  for (const auto& rating : ratings) {
    for (double value : {rating.adequacy, rating.fluency}) {
      if (!(value >= kRatingMin && value <= kRatingMax)) {
        throw ValidationError("rating for '" + rating.id + "' outside [1, 5]: " +
                              format_double(value));
      }
    }
    adequacy += rating.adequacy;
    fluency += rating.fluency;
  }
  const double count = static_cast<double>(ratings.size());
  auto percent = [&](double sum) {
    return std::round(sum / count / kRatingMax * 100.0 * 100.0) / 100.0;
  };
  return {percent(adequacy), percent(fluency)};
}

std::vector<SubjectiveRating> load_subjective(const std::filesystem::path& file) {
  std::vector<SubjectiveRating> ratings;
  const auto lines = read_lines(file);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto fields = split_fields(lines[i], '\t');
    if (fields.size() != 3) {
      throw ParseError(file.string() + ":" + std::to_string(i + 1) +
                       ": expected id, adequacy, fluency");
    }
    ratings.push_back({fields[0], parse_double(fields[1], "adequacy"),
                       parse_double(fields[2], "fluency")});
  }
  return ratings;
}

std::string format_percent(double percent) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.2f%%", percent);
  return buffer;
}

}  // namespace lexsmt

#include "lexsmt/mert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lexsmt/error.hpp"

namespace lexsmt {

CandidatePool::CandidatePool(std::vector<Tokens> references)
    : references_(std::move(references)), candidates_(references_.size()) {}

std::size_t CandidatePool::add(std::size_t sentence, const Tokens& tokens,
                               const FeatureVector& features) {
  if (sentence >= candidates_.size()) throw ContractError("pool sentence index out of range");
  auto& list = candidates_[sentence];
  for (const auto& existing : list) {
    if (existing.tokens == tokens) return 0;
  }
  Candidate candidate;
  candidate.tokens = tokens;
  candidate.features = features;
  candidate.stats = bleu_stats(tokens, references_[sentence]);
  candidate.sentence_bleu = smoothed_bleu_from_stats(candidate.stats);
  list.push_back(std::move(candidate));
  return 1;
}

std::size_t CandidatePool::merge(std::size_t sentence, const std::vector<Translation>& nbest) {
  std::size_t added = 0;
  for (const auto& translation : nbest) added += add(sentence, translation.tokens, translation.features);
  return added;
}

std::size_t CandidatePool::merge(const std::vector<std::vector<Translation>>& nbest) {
  if (nbest.size() != candidates_.size()) {
    throw ContractError("n-best lists do not match the pool's sentence count");
  }
  std::size_t added = 0;
  for (std::size_t s = 0; s < nbest.size(); ++s) added += merge(s, nbest[s]);
  return added;
}

std::size_t CandidatePool::size() const {
  std::size_t total = 0;
  for (const auto& list : candidates_) total += list.size();
  return total;
}

std::size_t CandidatePool::best_index(std::size_t sentence, const WeightVector& weights) const {
  const auto& list = candidates_.at(sentence);
  if (list.empty()) throw ContractError("sentence has no candidates");
  std::size_t best = 0;
  double best_score = weights.dot(list[0].features);
  for (std::size_t c = 1; c < list.size(); ++c) {
    const double score = weights.dot(list[c].features);
    if (score > best_score || (score == best_score && list[c].tokens < list[best].tokens)) {
      best = c;
      best_score = score;
    }
  }
  return best;
}

BleuStats CandidatePool::stats(const WeightVector& weights) const {
  BleuStats total;
  for (std::size_t s = 0; s < candidates_.size(); ++s) {
    total += candidates_[s][best_index(s, weights)].stats;
  }
  return total;
}

double CandidatePool::bleu(const WeightVector& weights) const {
  return bleu_from_stats(stats(weights));
}

namespace {

struct Line {
  double slope;
  double intercept;
  std::size_t candidate;
};

struct Event {
  double x;
  std::size_t sentence;
  std::size_t from;
  std::size_t to;
};

// Upper envelope of the lines, left to right. starts[i] is where lines[i]
// takes over.
void upper_envelope(std::vector<Line> lines, const std::vector<Candidate>& candidates,
                    std::vector<Line>& hull, std::vector<double>& starts) {
  std::sort(lines.begin(), lines.end(), [&](const Line& a, const Line& b) {
    if (a.slope != b.slope) return a.slope < b.slope;
    if (a.intercept != b.intercept) return a.intercept > b.intercept;
    return candidates[a.candidate].tokens < candidates[b.candidate].tokens;
  });
  hull.clear();
  starts.clear();
  for (const auto& line : lines) {
    if (!hull.empty() && hull.back().slope == line.slope) continue;
    double x = -std::numeric_limits<double>::infinity();
    while (!hull.empty()) {
      x = (hull.back().intercept - line.intercept) / (line.slope - hull.back().slope);
      if (x <= starts.back()) {
        hull.pop_back();
        starts.pop_back();
        x = -std::numeric_limits<double>::infinity();
      } else {
        break;
      }
    }
    hull.push_back(line);
    starts.push_back(x);
  }
}

}  // namespace

LineSearchResult line_search(const CandidatePool& pool, const WeightVector& weights,
                             std::size_t dimension) {
  if (dimension >= kNumFeatures) throw ContractError("dimension out of range");
  const double current = weights.values[dimension];

  BleuStats stats;
  double smoothed = 0.0;
  std::vector<Event> events;
  std::vector<const Candidate*> winner(pool.sentences());
  for (std::size_t s = 0; s < pool.sentences(); ++s) {
    const auto& candidates = pool.candidates(s);
    if (candidates.empty()) throw ContractError("sentence has no candidates");
    std::vector<Line> lines;
    lines.reserve(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto& f = candidates[c].features;
      const double slope = f[dimension];
      lines.push_back({slope, weights.dot(f) - current * slope, c});
    }
    std::vector<Line> hull;
    std::vector<double> starts;
    upper_envelope(std::move(lines), candidates, hull, starts);
    stats += candidates[hull[0].candidate].stats;
    smoothed += candidates[hull[0].candidate].sentence_bleu;
    for (std::size_t i = 1; i < hull.size(); ++i) {
      events.push_back({starts[i], s, hull[i - 1].candidate, hull[i].candidate});
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.x < b.x; });

  // Walk the intervals left to right.
  LineSearchResult best{current, -1.0, -std::numeric_limits<double>::infinity()};
  bool best_holds_current = false;
  auto consider = [&](double lo, double hi, double point) {
    const double value = bleu_from_stats(stats);
    const bool holds = lo < current && current < hi;
    const bool better =
        value > best.bleu || (value == best.bleu && smoothed > best.smoothed_sum);
    const bool tie = value == best.bleu && smoothed == best.smoothed_sum;
    if (better || (tie && holds && !best_holds_current)) {
      best = {holds ? current : point, value, smoothed};
      best_holds_current = holds;
    }
  };
  const double inf = std::numeric_limits<double>::infinity();
  if (events.empty()) {
    consider(-inf, inf, current);
    return best;
  }
  double lo = -inf;
  std::size_t i = 0;
  while (i <= events.size()) {
    const double hi = i < events.size() ? events[i].x : inf;
    double point;
    if (lo == -inf) {
      point = hi - 1.0;
    } else if (hi == inf) {
      point = lo + 1.0;
    } else {
      point = lo + (hi - lo) / 2.0;
    }
    consider(lo, hi, point);
    if (i == events.size()) break;
    const double x = events[i].x;
    while (i < events.size() && events[i].x == x) {
      const auto& candidates = pool.candidates(events[i].sentence);
      stats -= candidates[events[i].from].stats;
      stats += candidates[events[i].to].stats;
      smoothed += candidates[events[i].to].sentence_bleu - candidates[events[i].from].sentence_bleu;
      ++i;
    }
    lo = x;
    if (i == events.size()) {
      consider(lo, inf, lo + 1.0);
      break;
    }
  }
  return best;
}

WeightVector optimize_pool(const CandidatePool& pool, const WeightVector& start,
                           const MertOptions& options, std::mt19937_64& rng) {
  auto climb = [&](WeightVector weights) {
    double current = pool.bleu(weights);
    for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
      bool improved = false;
      for (std::size_t d = 0; d < kNumFeatures; ++d) {
        if (!options.tunable[d]) continue;
        const auto result = line_search(pool, weights, d);
        if (result.value == weights.values[d]) continue;
        WeightVector candidate = weights;
        candidate.values[d] = result.value;
        const double value = pool.bleu(candidate);
        if (value > current) {
          weights = candidate;
          current = value;
          improved = true;
        }
      }
      if (!improved) break;
    }
    return std::pair{weights, current};
  };

  auto best = climb(start);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (std::size_t r = 0; r < options.restarts; ++r) {
    WeightVector point = start;
    for (std::size_t d = 0; d < kNumFeatures; ++d) {
      const double draw = uniform(rng);
      if (options.tunable[d]) point.values[d] = draw;
    }
    auto result = climb(point);
    if (result.second > best.second) best = result;
  }
  return best.first;
}

TuneResult tune_weights(const std::vector<Tokens>& sources, const std::vector<Tokens>& references,
                        const PhraseTable& table, const NGramModel& lm,
                        const WeightVector& initial, const DecoderConfig& decoder_config,
                        const MertOptions& options) {
  if (sources.empty()) throw ContractError("tuning corpus is empty");
  if (sources.size() != references.size()) {
    throw ContractError("tuning sources and references differ in length");
  }
  if (options.iterations == 0 || options.nbest == 0) {
    throw ContractError("MERT needs at least one iteration and n-best size 1");
  }
  std::mt19937_64 rng(options.seed);
  CandidatePool pool(references);
  TuneResult result;
  result.weights = initial;
  double best_decoded = -1.0;
  WeightVector weights = initial;
  auto decoded_bleu = [&](const std::vector<std::vector<Translation>>& nbest) {
    std::vector<Tokens> hypotheses;
    hypotheses.reserve(nbest.size());
    for (const auto& list : nbest) hypotheses.push_back(list.front().tokens);
    return bleu(hypotheses, references).score;
  };
  // Pool BLEU of different pools is not comparable, so the returned weights are
  // the ones whose own 1-best output scores highest, earliest on ties.
  auto consider = [&](const WeightVector& w, double value) {
    if (value > best_decoded) {
      best_decoded = value;
      result.weights = w;
    }
  };
  bool pending = false;
  for (std::size_t iteration = 1; iteration <= options.iterations; ++iteration) {
    const Decoder decoder(table, lm, weights, decoder_config);
    const auto nbest = decode_corpus_nbest(decoder, sources, options.nbest, options.threads);
    consider(weights, decoded_bleu(nbest));
    pending = false;
    const std::size_t added = pool.merge(nbest);
    if (iteration > 1 && added == 0) break;
    const WeightVector optimized = optimize_pool(pool, weights, options, rng);
    const double value = pool.bleu(optimized);
    if (result.trace.empty() || value >= result.trace.back().bleu) {
      result.trace.push_back({iteration, optimized, value, pool.size()});
    }
    pending = optimized != weights;
    weights = optimized;
  }
  if (pending) {
    const Decoder decoder(table, lm, weights, decoder_config);
    consider(weights, decoded_bleu(decode_corpus_nbest(decoder, sources, 1, options.threads)));
  }
  result.tune_bleu = best_decoded;
  return result;
}

std::string trace_csv(const std::vector<TraceEntry>& trace) {
  std::string out = "iteration,bleu,pool_size";
  for (std::size_t d = 0; d < kNumFeatures; ++d) {
    out += ',';
    out += feature_name(d);
  }
  out += '\n';
  for (const auto& entry : trace) {
    out += std::to_string(entry.iteration) + ',' + format_double(entry.bleu) + ',' +
           std::to_string(entry.pool_size);
    for (double w : entry.weights.values) out += ',' + format_double(w);
    out += '\n';
  }
  return out;
}

}  // namespace lexsmt

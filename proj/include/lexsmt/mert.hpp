#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lexsmt/decoder.hpp"
#include "lexsmt/eval.hpp"

namespace lexsmt {

struct Candidate {
  Tokens tokens;
  FeatureVector features{};
  BleuStats stats;
  double sentence_bleu = 0.0;
};

// Per-sentence candidate lists accumulated over tuning iterations, distinct in
// token sequence.
class CandidatePool {
 public:
  explicit CandidatePool(std::vector<Tokens> references);

  // Returns the number of candidates that were new.
  std::size_t merge(std::size_t sentence, const std::vector<Translation>& nbest);
  std::size_t merge(const std::vector<std::vector<Translation>>& nbest);
  std::size_t add(std::size_t sentence, const Tokens& tokens, const FeatureVector& features);

  // Index of the highest-scoring candidate; ties go to the smaller string.
  std::size_t best_index(std::size_t sentence, const WeightVector& weights) const;
  BleuStats stats(const WeightVector& weights) const;
  double bleu(const WeightVector& weights) const;

  std::size_t sentences() const { return candidates_.size(); }
  std::size_t size() const;
  const std::vector<Candidate>& candidates(std::size_t sentence) const {
    return candidates_[sentence];
  }

 private:
  std::vector<Tokens> references_;
  std::vector<std::vector<Candidate>> candidates_;
};

struct MertOptions {
  std::size_t iterations = 10;
  std::size_t nbest = 100;
  std::size_t restarts = 8;
  std::uint64_t seed = 1;
  // Dimensions left out keep their starting value.
  std::array<bool, kNumFeatures> tunable{true, true, true, true, true, true, true};
  // Coordinate-ascent sweeps per starting point.
  std::size_t max_sweeps = 25;
  std::size_t threads = 1;
};

struct LineSearchResult {
  double value = 0.0;
  double bleu = 0.0;
  double smoothed_sum = 0.0;
};

// Exact search along one weight: the other weights fixed, each sentence's
// winner changes only where its candidates' score lines cross, so corpus BLEU
// is evaluated once per interval of the merged upper envelopes. Intervals are
// ranked by corpus BLEU, then by summed add-one-smoothed sentence BLEU; the
// interval holding the current value wins ties and keeps that value.
LineSearchResult line_search(const CandidatePool& pool, const WeightVector& weights,
                             std::size_t dimension);

// Coordinate ascent from `start` and from `options.restarts` random points in
// [-1, 1]^7. A step is taken only when it strictly raises corpus BLEU.
WeightVector optimize_pool(const CandidatePool& pool, const WeightVector& start,
                           const MertOptions& options, std::mt19937_64& rng);

struct TraceEntry {
  std::size_t iteration = 0;
  WeightVector weights;
  double bleu = 0.0;
  std::size_t pool_size = 0;
};

struct TuneResult {
  WeightVector weights;
  // Corpus BLEU of the decoder's 1-best tuning output under `weights`.
  double tune_bleu = 0.0;
  std::vector<TraceEntry> trace;
};

// Decode n-best, merge into the pool, optimize; stops early once the pool no
// longer grows. An iteration is recorded only when its pool BLEU is at least
// the last recorded one. The returned weights are those, initial included,
// whose decoded tuning output has the highest BLEU.
TuneResult tune_weights(const std::vector<Tokens>& sources, const std::vector<Tokens>& references,
                        const PhraseTable& table, const NGramModel& lm,
                        const WeightVector& initial, const DecoderConfig& decoder_config,
                        const MertOptions& options = {});

// "iteration,bleu,pool_size,w1..w7" with a header row.
std::string trace_csv(const std::vector<TraceEntry>& trace);

}  // namespace lexsmt

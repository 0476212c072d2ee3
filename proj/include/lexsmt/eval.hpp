#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lexsmt/lexicon.hpp"
#include "lexsmt/text.hpp"

namespace lexsmt {

inline constexpr int kMaxNgramOrder = 8;

// Sufficient statistics for BLEU; summing them over sentences gives the
// corpus statistics.
struct BleuStats {
  std::array<std::size_t, kMaxNgramOrder> matches{};
  std::array<std::size_t, kMaxNgramOrder> totals{};
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;

  BleuStats& operator+=(const BleuStats& other);
  BleuStats& operator-=(const BleuStats& other);
  bool operator==(const BleuStats&) const = default;
};

BleuStats bleu_stats(const Tokens& hyp, const Tokens& ref, int max_n = 4);

// Geometric mean of clipped precisions times the brevity penalty, in
// [0, 100]. Orders for which the hypothesis has no n-grams at all are left
// out of the mean.
double bleu_from_stats(const BleuStats& stats, int max_n = 4);

// As above, but precisions for n >= 2 use add-one smoothing.
double smoothed_bleu_from_stats(const BleuStats& stats, int max_n = 4);

struct BleuResult {
  double score = 0.0;
  double brevity_penalty = 0.0;
  std::vector<double> precisions;
  BleuStats stats;
};

// Corpus BLEU with one reference per hypothesis. Throws ContractError on a
// length mismatch.
BleuResult bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references,
                int max_n = 4);

double sentence_bleu(const Tokens& hyp, const Tokens& ref, int max_n = 4);

// Symmetric word-level synonym relation drawn from a resource set: the two
// sides of a single-token entry, and single-token targets that share a
// source expression.
class SynonymIndex {
 public:
  SynonymIndex() = default;
  explicit SynonymIndex(const ResourceSet& resources);

  bool synonyms(const std::string& a, const std::string& b) const;
  bool empty() const { return neighbors_.empty(); }

 private:
  void link(const std::string& a, const std::string& b);
  std::map<std::string, std::set<std::string>> neighbors_;
};

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

struct MeteorStats {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;

  MeteorStats& operator+=(const MeteorStats& other);
};

// Greedy unigram alignment, exact matches first and synonym matches second.
MeteorStats meteor_stats(const Tokens& hyp, const Tokens& ref,
                         const SynonymIndex* synonyms = nullptr);
double meteor_from_stats(const MeteorStats& stats, const MeteorParams& params = {});

double meteor_lite(const Tokens& hyp, const Tokens& ref, const ResourceSet* synonyms = nullptr,
                   const MeteorParams& params = {});

struct TerOptions {
  bool shifts = true;
  std::size_t max_shift_span = 10;
};

struct TerStats {
  std::size_t edits = 0;  // insertions + deletions + substitutions
  std::size_t shifts = 0;
  std::size_t ref_length = 0;

  TerStats& operator+=(const TerStats& other);
};

// Word-level Levenshtein distance.
std::size_t edit_distance(const Tokens& hyp, const Tokens& ref);

// Greedy block shifts: repeatedly applies the shift that most reduces the
// edit distance, while one reduces it. Throws ContractError for an empty
// reference.
TerStats ter_stats(const Tokens& hyp, const Tokens& ref, const TerOptions& options = {});
double ter_from_stats(const TerStats& stats);
double ter(const Tokens& hyp, const Tokens& ref, const TerOptions& options = {});

struct EvalScores {
  double bleu = 0.0;    // [0, 100]
  double meteor = 0.0;  // [0, 1]
  double ter = 0.0;     // percentage
  BleuStats bleu_stats;
  MeteorStats meteor_stats;
  TerStats ter_stats;
};

EvalScores evaluate(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references,
                    const SynonymIndex* synonyms = nullptr);

struct BootstrapInterval {
  double low = 0.0;
  double high = 0.0;
};

// Percentile interval of corpus BLEU over `samples` resamples of sentences.
BootstrapInterval bootstrap_bleu(const std::vector<Tokens>& hypotheses,
                                 const std::vector<Tokens>& references, std::size_t samples,
                                 std::uint64_t seed, double confidence = 0.95);

struct SubjectiveRating {
  std::string id;
  double adequacy = 0.0;
  double fluency = 0.0;
};

struct SubjectiveSummary {
  double adequacy_percent = 0.0;
  double fluency_percent = 0.0;
};

inline constexpr double kRatingMin = 1.0;
inline constexpr double kRatingMax = 5.0;

// Mean rating / 5 * 100 per dimension, rounded to two decimals.
SubjectiveSummary aggregate_subjective(const std::vector<SubjectiveRating>& ratings);

// TSV id<TAB>adequacy<TAB>fluency.
std::vector<SubjectiveRating> load_subjective(const std::filesystem::path& file);

// "87.67%"
std::string format_percent(double percent);

}  // namespace lexsmt

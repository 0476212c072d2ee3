#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lexsmt/lm.hpp"
#include "lexsmt/phrase.hpp"
#include "lexsmt/text.hpp"

namespace lexsmt {

inline constexpr std::size_t kNumFeatures = 7;
using FeatureVector = std::array<double, kNumFeatures>;

// Feature order: p(t|s), p(s|t), lex(t|s), lex(s|t) (all natural logs), LM
// log-probability, word penalty (minus the output length), distortion (minus
// the summed jump distances).
enum Feature : std::size_t {
  kPTargetGivenSource = 0,
  kPSourceGivenTarget = 1,
  kLexTargetGivenSource = 2,
  kLexSourceGivenTarget = 3,
  kLanguageModel = 4,
  kWordPenalty = 5,
  kDistortion = 6,
};

std::string_view feature_name(std::size_t index);

struct WeightVector {
  FeatureVector values{};

  static WeightVector defaults();
  double dot(const FeatureVector& features) const;
  // Throws ValidationError on a non-finite weight.
  void validate() const;

  // One "name value" line per feature, in feature order.
  std::string dump() const;
  void write(const std::filesystem::path& file) const;
  // Every feature must appear exactly once; order is free.
  static WeightVector parse(std::string_view text);
  static WeightVector load(const std::filesystem::path& file);

  bool operator==(const WeightVector&) const = default;
};

inline constexpr double kUnknownPhraseProb = 1e-7;
inline constexpr const char* kUnknownMarker = "|UNK|";

struct DecoderConfig {
  std::size_t beam = 100;
  // Negative means unlimited.
  int distortion_limit = 6;
  // Translation options kept per source span, best estimate first; 0 keeps
  // all.
  std::size_t options_limit = 20;
  // Render pass-through words as "|UNK|" instead of the bare word.
  bool mark_unk = false;
};

struct TranslationOption {
  int source_start = 0;
  int source_end = 0;
  Tokens target;
  // Log phrase scores in feature order.
  std::array<double, 4> tm{};
  bool unknown = false;
  // Weighted phrase scores, word penalty and unigram LM of the target side.
  double estimate = 0.0;
};

struct DerivationStep {
  int source_start = 0;
  int source_end = 0;
  Tokens target;
  std::array<double, 4> tm{};
  bool unknown = false;
};

struct Translation {
  // Rendered output; unknown words follow DecoderConfig::mark_unk.
  Tokens tokens;
  FeatureVector features{};
  double score = 0.0;
  std::vector<DerivationStep> steps;
};

// Features of a derivation, recomputed from scratch: summed phrase scores, the
// LM score of the bare target string with </s>, the word penalty and the
// distortion of the step order.
FeatureVector derivation_features(const std::vector<DerivationStep>& steps,
                                  const NGramModel& lm);

// Target words of the derivation, with unknown words left bare.
Tokens derivation_target(const std::vector<DerivationStep>& steps);

// Stack decoder. Stacks are indexed by the number of covered source words and
// pruned to the beam, on score plus future cost, right before they are
// expanded. Hypotheses with the same coverage, LM state and last source
// position are recombined; every merged edge is kept, so n-best lists are
// read off the resulting lattice best-first.
class Decoder {
 public:
  Decoder(const PhraseTable& table, const NGramModel& lm, WeightVector weights,
          DecoderConfig config = {});

  Translation decode(const Tokens& sentence) const;
  // Up to n distinct outputs, best first; ties go to the lexicographically
  // smaller string.
  std::vector<Translation> decode_nbest(const Tokens& sentence, std::size_t n) const;

  // The options the search draws from: every phrase table match, capped per
  // span, plus a pass-through option for each word with no one-word entry.
  std::vector<TranslationOption> collect_options(const Tokens& sentence) const;

  const WeightVector& weights() const { return weights_; }
  const DecoderConfig& config() const { return config_; }

 private:
  std::vector<Translation> search(const Tokens& sentence, std::size_t n, int distortion_limit,
                                  bool& complete) const;

  const PhraseTable& table_;
  const NGramModel& lm_;
  WeightVector weights_;
  DecoderConfig config_;
};

// Decodes sentences on up to `threads` workers; output order follows input.
std::vector<std::vector<Translation>> decode_corpus_nbest(const Decoder& decoder,
                                                          const std::vector<Tokens>& sentences,
                                                          std::size_t n, std::size_t threads = 1);
std::vector<Tokens> decode_corpus(const Decoder& decoder, const std::vector<Tokens>& sentences,
                                  std::size_t threads = 1);

// "id ||| tokens ||| f1 ... f7 ||| score"
std::string nbest_line(std::size_t sentence_id, const Translation& translation);

struct NBestEntry {
  std::size_t sentence_id = 0;
  Tokens tokens;
  FeatureVector features{};
  double score = 0.0;
};

NBestEntry parse_nbest_line(std::string_view line);

}  // namespace lexsmt

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lexsmt/align.hpp"
#include "lexsmt/corpus.hpp"
#include "lexsmt/decoder.hpp"
#include "lexsmt/eval.hpp"
#include "lexsmt/lm.hpp"
#include "lexsmt/mert.hpp"

namespace lexsmt {

// Cumulative ladder: each stage includes all earlier ones.
enum class Stage {
  baseline,
  cleaning,
  suffix_split,
  add_synsets,
  add_function_kridanta,
  add_verb_phrases,
};
inline constexpr std::size_t kNumStages = 6;

std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view text);

// "uncleaned", "cleaned", "suffix_split", "wordnet", "function_kridanta",
// "verb_phrases".
const std::vector<std::string>& ladder_names();
std::vector<Stage> ladder_stages(std::string_view name);
// Throws ConfigError unless `stages` is a non-empty prefix of the ladder.
std::string ladder_name(const std::vector<Stage>& stages);

struct Direction {
  std::string source;
  std::string target;

  static Direction parse(std::string_view text);  // "mr-hi"
  std::string str() const { return source + "-" + target; }
  Direction reversed() const { return {target, source}; }
  bool operator==(const Direction&) const = default;
};

struct ExperimentPaths {
  std::filesystem::path train_manifest;
  std::filesystem::path patches;
  std::filesystem::path rules;
  std::filesystem::path synsets;
  std::filesystem::path function_kridanta;
  std::filesystem::path verb_phrases;
  std::filesystem::path tune_source;
  std::filesystem::path tune_target;
  std::filesystem::path test_source;
  std::filesystem::path test_target;
  // Optional; holds <direction>.<config>.<on|off>.tsv rating files.
  std::filesystem::path subjective_dir;
};

struct PipelineParams {
  CleanConfig clean;
  Model1Options model1;
  Heuristic heuristic = Heuristic::grow_diag_final_and;
  int max_phrase_len = 5;
  LmOptions lm;
  DecoderConfig decoder;
  MertOptions mert;
  WeightVector initial = WeightVector::defaults();
  std::size_t augment_repeat = 1;
};

struct ExperimentConfig {
  // Orientation of the corpus files and of the resource files.
  Direction corpus_direction{"mr", "hi"};
  Direction resource_direction{"hi", "mr"};
  // Language whose side gets suffix splitting.
  std::string split_language = "mr";
  Direction direction{"mr", "hi"};
  std::vector<Stage> stages;
  bool tuning = false;
  std::uint64_t seed = 1;
  ExperimentPaths paths;
  PipelineParams params;

  // Every setting that affects results plus content hashes of the inputs.
  std::string canonical() const;
  std::string hash() const;
  std::string name() const { return ladder_name(stages); }
};

struct RunRow {
  std::string direction;
  std::string config;
  bool tuning = false;
  double bleu = 0.0;
  double meteor = 0.0;
  double ter = 0.0;
  std::size_t oov_tokens = 0;
  std::size_t test_tokens = 0;
  std::optional<SubjectiveSummary> subjective;
  std::string run_id;
  std::string phrase_table_hash;
  std::string lm_hash;

  double oov_rate() const {
    return test_tokens == 0 ? 0.0
                            : static_cast<double>(oov_tokens) / static_cast<double>(test_tokens);
  }
};

struct RunOutcome {
  RunRow row;
  double seconds = 0.0;
};

// Source tokens of `sentences` that no phrase-table source phrase contains.
std::size_t count_oov(const std::vector<Tokens>& sentences, const PhraseTable& table);

// Same-language synonym pairs: targets that share a source expression.
ResourceSet sibling_synonyms(const ResourceSet& resources);

// Runs every stage of one configuration and persists the artifacts under
// out_dir/runs/<config hash>. Missing inputs for enabled stages raise
// ConfigError before any training.
RunOutcome run_pipeline(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct MatrixConfig {
  ExperimentConfig base;
  std::vector<Direction> directions;
  std::vector<std::string> configs;
  std::vector<bool> tuning;
  bool assert_ladder = false;
  std::size_t jobs = 1;

  // key = value lines, '#' comments. Relative paths resolve against
  // `base_dir`.
  static MatrixConfig parse(std::string_view text, const std::filesystem::path& base_dir);
  static MatrixConfig load(const std::filesystem::path& file);

  // Direction major, ladder, then tuning off before on.
  std::vector<ExperimentConfig> expand() const;
};

struct MatrixResult {
  std::vector<RunRow> rows;
  std::vector<double> seconds;
};

// Runs the expanded matrix (up to `jobs` runs at once), writes the reports
// and timings.tsv, then checks the ladder when asked.
MatrixResult run_matrix(const MatrixConfig& matrix, const std::filesystem::path& out_dir);

// Throws LadderError when OOV rises from one ladder stage to the next within
// a direction and tuning state.
void check_ladder(const std::vector<RunRow>& rows);

// Rows sorted ladder major, tuning minor. Writes report.csv, report.md and
// series/<direction>.<metric>.tsv.
void emit_report(const std::vector<RunRow>& rows, const std::filesystem::path& out_dir);
std::string report_csv(const std::vector<RunRow>& rows);
std::string report_markdown(const std::vector<RunRow>& rows);

}  // namespace lexsmt

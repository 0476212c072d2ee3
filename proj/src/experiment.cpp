#include "lexsmt/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <map>
#include <thread>
#include <tuple>

#include "lexsmt/error.hpp"
#include "lexsmt/lexicon.hpp"
#include "lexsmt/morph.hpp"
#include "lexsmt/phrase.hpp"

namespace fs = std::filesystem;

namespace lexsmt {

namespace {

constexpr std::array<std::string_view, kNumStages> kStageNames = {
    "baseline",    "cleaning",          "suffix_split",
    "add_synsets", "add_function_kridanta", "add_verb_phrases"};

std::string fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  return buffer;
}

std::string_view heuristic_name(Heuristic heuristic) {
  switch (heuristic) {
    case Heuristic::intersection:
      return "intersection";
    case Heuristic::union_:
      return "union";
    case Heuristic::grow_diag_final_and:
      return "grow-diag-final-and";
  }
  return "?";
}

std::string file_digest(const fs::path& path) { return hex64(fnv1a(read_file(path))); }

std::string corpus_digest(const ParallelCorpus& corpus) {
  std::uint64_t h = fnv1a("");
  for (const auto& pair : corpus.pairs) {
    h = fnv1a(join(pair.source), h);
    h = fnv1a("\t", h);
    h = fnv1a(join(pair.target), h);
    h = fnv1a("\n", h);
  }
  return hex64(h);
}

std::size_t ladder_index(const std::string& name) {
  const auto& names = ladder_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("unknown configuration '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

bool parse_bool(std::string_view text, std::string_view key) {
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw ConfigError(std::string(key) + ": expected a boolean, got '" + std::string(text) + "'");
}

std::vector<std::string> parse_list(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& field : split_fields(text, ',')) {
    const auto item = trim(field);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

void require(const fs::path& path, std::string_view what) {
  if (path.empty()) throw ConfigError(std::string(what) + " is not configured");
  if (!fs::exists(path)) {
    throw ConfigError(std::string(what) + " not found: " + path.string());
  }
}

bool has_stage(const ExperimentConfig& config, Stage stage) {
  return std::find(config.stages.begin(), config.stages.end(), stage) != config.stages.end();
}

void check_inputs(const ExperimentConfig& config) {
  ladder_name(config.stages);
  const auto& p = config.paths;
  require(p.train_manifest, "training manifest");
  require(p.test_source, "test source");
  require(p.test_target, "test reference");
  if (has_stage(config, Stage::cleaning)) require(p.patches, "patch file");
  if (has_stage(config, Stage::suffix_split)) require(p.rules, "suffix rule file");
  if (has_stage(config, Stage::add_synsets)) require(p.synsets, "synset file");
  if (has_stage(config, Stage::add_function_kridanta)) {
    require(p.function_kridanta, "function/kridanta file");
  }
  if (has_stage(config, Stage::add_verb_phrases)) require(p.verb_phrases, "verb phrase file");
  if (config.tuning) {
    require(p.tune_source, "tuning source");
    require(p.tune_target, "tuning reference");
  }
}

}  // namespace

std::string_view to_string(Stage stage) { return kStageNames[static_cast<std::size_t>(stage)]; }

Stage parse_stage(std::string_view text) {
  for (std::size_t i = 0; i < kNumStages; ++i) {
    if (kStageNames[i] == text) return static_cast<Stage>(i);
  }
  throw ConfigError("unknown stage '" + std::string(text) + "'");
}

const std::vector<std::string>& ladder_names() {
  static const std::vector<std::string> names = {"uncleaned", "cleaned",           "suffix_split",
                                                 "wordnet",   "function_kridanta", "verb_phrases"};
  return names;
}

std::vector<Stage> ladder_stages(std::string_view name) {
  const std::size_t index = ladder_index(std::string(name));
  std::vector<Stage> stages;
  for (std::size_t i = 0; i <= index; ++i) stages.push_back(static_cast<Stage>(i));
  return stages;
}

std::string ladder_name(const std::vector<Stage>& stages) {
  if (stages.empty()) throw ConfigError("stage list is empty");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i] != static_cast<Stage>(i)) {
      throw ConfigError("stages must follow the ladder order starting at baseline; got '" +
                        std::string(to_string(stages[i])) + "' at position " +
                        std::to_string(i + 1));
    }
  }
  return ladder_names()[stages.size() - 1];
}

Direction Direction::parse(std::string_view text) {
  const auto parts = split_fields(trim(text), '-');
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty() || parts[0] == parts[1]) {
    throw ConfigError("direction must look like 'mr-hi', got '" + std::string(text) + "'");
  }
  return {parts[0], parts[1]};
}

std::string ExperimentConfig::canonical() const {
  auto has = [this](Stage s) { return has_stage(*this, s); };
  std::string out;
  auto put = [&out](std::string_view key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  put("direction", direction.str());
  put("corpus_direction", corpus_direction.str());
  put("resource_direction", resource_direction.str());
  put("split_language", split_language);
  put("config", name());
  put("tuning", tuning ? "on" : "off");
  put("seed", std::to_string(seed));
  put("clean.max_length", std::to_string(params.clean.max_length));
  put("clean.max_ratio", format_double(params.clean.max_ratio));
  put("model1.iterations", std::to_string(params.model1.iterations));
  put("model1.floor", format_double(params.model1.floor));
  put("heuristic", std::string(heuristic_name(params.heuristic)));
  put("max_phrase_len", std::to_string(params.max_phrase_len));
  put("lm.order", std::to_string(params.lm.order));
  put("lm.lambda", format_double(params.lm.lambda));
  put("lm.unknown_floor", format_double(params.lm.unknown_floor));
  put("decoder.beam", std::to_string(params.decoder.beam));
  put("decoder.distortion_limit", std::to_string(params.decoder.distortion_limit));
  put("decoder.options_limit", std::to_string(params.decoder.options_limit));
  if (tuning) {
    put("mert.iterations", std::to_string(params.mert.iterations));
    put("mert.nbest", std::to_string(params.mert.nbest));
    put("mert.restarts", std::to_string(params.mert.restarts));
    put("mert.max_sweeps", std::to_string(params.mert.max_sweeps));
  }
  for (std::size_t d = 0; d < kNumFeatures; ++d) {
    put("initial." + std::string(feature_name(d)), format_double(params.initial.values[d]));
  }
  put("augment_repeat", std::to_string(params.augment_repeat));

  put("input.train", corpus_digest(ingest_manifest(paths.train_manifest)));
  put("input.test_source", file_digest(paths.test_source));
  put("input.test_target", file_digest(paths.test_target));
  if (!paths.synsets.empty() && fs::exists(paths.synsets)) {
    put("input.synsets", file_digest(paths.synsets));
  }
  if (has(Stage::cleaning)) put("input.patches", file_digest(paths.patches));
  if (has(Stage::suffix_split)) put("input.rules", file_digest(paths.rules));
  if (has(Stage::add_function_kridanta)) {
    put("input.function_kridanta", file_digest(paths.function_kridanta));
  }
  if (has(Stage::add_verb_phrases)) put("input.verb_phrases", file_digest(paths.verb_phrases));
  if (tuning) {
    put("input.tune_source", file_digest(paths.tune_source));
    put("input.tune_target", file_digest(paths.tune_target));
  }
  return out;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a(canonical())); }

std::size_t count_oov(const std::vector<Tokens>& sentences, const PhraseTable& table) {
  std::size_t oov = 0;
  for (const auto& sentence : sentences) {
    for (const auto& token : sentence) {
      if (!table.has_source_word(token)) ++oov;
    }
  }
  return oov;
}

ResourceSet sibling_synonyms(const ResourceSet& resources) {
  std::map<Tokens, std::vector<Tokens>> groups;
  for (const auto& entry : resources.entries()) groups[entry.source_expr].push_back(entry.target_expr);
  ResourceSet out;
  for (const auto& [source, targets] : groups) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      for (std::size_t j = i + 1; j < targets.size(); ++j) {
        if (targets[i] != targets[j]) out.add({targets[i], targets[j], Category::synset});
      }
    }
  }
  return out;
}

RunOutcome run_pipeline(const ExperimentConfig& config, const fs::path& out_dir) {
  const auto started = std::chrono::steady_clock::now();
  const std::string name = config.name();
  auto has = [&config](Stage s) { return has_stage(config, s); };
  const auto& paths = config.paths;
  check_inputs(config);
  const Direction& direction = config.direction;
  if (direction != config.corpus_direction && direction != config.corpus_direction.reversed()) {
    throw ConfigError("direction " + direction.str() + " does not match corpus direction " +
                      config.corpus_direction.str());
  }
  if (direction != config.resource_direction &&
      direction != config.resource_direction.reversed()) {
    throw ConfigError("direction " + direction.str() + " does not match resource direction " +
                      config.resource_direction.str());
  }

  const std::string run_id = config.hash();
  const fs::path run_dir = out_dir / "runs" / run_id;
  fs::create_directories(run_dir);
  write_file(run_dir / "config.txt", config.canonical());

  ParallelCorpus train = ingest_manifest(paths.train_manifest);
  train.language_pair = config.corpus_direction.str();
  if (has(Stage::cleaning)) {
    auto cleaned = clean_corpus(train, PatchSet::load(paths.patches), config.params.clean);
    write_file(run_dir / "clean_report.tsv", cleaned.report.to_tsv());
    train = std::move(cleaned.corpus);
  }
  ParallelCorpus tune;
  if (config.tuning) tune = ingest_parallel(paths.tune_source, paths.tune_target, "tune");
  ParallelCorpus test = ingest_parallel(paths.test_source, paths.test_target, "test");

  ResourceSet resources;
  if (has(Stage::add_synsets)) resources.merge(load_synsets(paths.synsets));
  if (has(Stage::add_function_kridanta)) {
    resources.merge(load_pair_resource(paths.function_kridanta, Category::function_word));
  }
  if (has(Stage::add_verb_phrases)) {
    resources.merge(load_pair_resource(paths.verb_phrases, Category::verb_phrase));
  }
  ResourceSet metric_synonyms;
  const bool have_synsets = !paths.synsets.empty() && fs::exists(paths.synsets);
  const ResourceSet all_synsets = have_synsets ? load_synsets(paths.synsets) : ResourceSet{};

  // Synonyms for METEOR live on the target language of this run.
  const bool target_is_resource_target = direction.target == config.resource_direction.target;
  ResourceSet oriented_synsets =
      target_is_resource_target ? all_synsets : all_synsets.reversed();

  if (has(Stage::suffix_split)) {
    const SuffixTable rules = SuffixTable::load(paths.rules);
    const Side corpus_side =
        config.split_language == config.corpus_direction.source ? Side::source : Side::target;
    if (config.split_language != config.corpus_direction.source &&
        config.split_language != config.corpus_direction.target) {
      throw ConfigError("split language " + config.split_language + " is not in " +
                        config.corpus_direction.str());
    }
    train = split_corpus(train, rules, corpus_side);
    if (config.tuning) tune = split_corpus(tune, rules, corpus_side);
    test = split_corpus(test, rules, corpus_side);
    auto splitter = [&rules](const Tokens& t) { return split_tokens(t, rules); };
    const Side resource_side =
        config.split_language == config.resource_direction.source ? Side::source : Side::target;
    resources = resources.map_side(resource_side, splitter);
    const Side synonym_side =
        config.split_language == (target_is_resource_target ? config.resource_direction.source
                                                            : config.resource_direction.target)
            ? Side::source
            : Side::target;
    oriented_synsets = oriented_synsets.map_side(synonym_side, splitter);
  }
  metric_synonyms = sibling_synonyms(oriented_synsets);

  if (direction != config.corpus_direction) {
    train = swap_sides(train);
    if (config.tuning) tune = swap_sides(tune);
    test = swap_sides(test);
  }
  if (direction != config.resource_direction) resources = resources.reversed();
  if (!resources.empty()) train = augment_corpus(train, resources, config.params.augment_repeat);
  write_corpus_dir(train, run_dir / "train");

  const auto forward = train_model1(train, config.params.model1);
  const auto backward = train_model1(swap_sides(train), config.params.model1);
  forward.table.write(run_dir / "model1.forward.tsv");
  backward.table.write(run_dir / "model1.backward.tsv");
  const auto alignments =
      align_corpus(train, forward.table, backward.table, config.params.heuristic);
  write_alignments(alignments, run_dir / "alignments.txt");
  const PhraseTable table =
      score_phrase_table(extract_corpus(train, alignments, config.params.max_phrase_len),
                         forward.table, backward.table);
  const std::string table_dump = table.dump();
  write_file(run_dir / "phrase_table.txt", table_dump);
  const NGramModel lm = train_lm(train.targets(), config.params.lm);
  const std::string lm_dump = lm.dump();
  write_file(run_dir / "lm.txt", lm_dump);

  WeightVector weights = config.params.initial;
  if (config.tuning) {
    MertOptions mert = config.params.mert;
    mert.seed = config.seed;
    const auto tuned = tune_weights(tune.sources(), tune.targets(), table, lm, weights,
                                    config.params.decoder, mert);
    weights = tuned.weights;
    write_file(run_dir / "trace.csv", trace_csv(tuned.trace));
  }
  weights.write(run_dir / "weights.txt");

  const Decoder decoder(table, lm, weights, config.params.decoder);
  const auto sources = test.sources();
  const auto references = test.targets();
  const auto hypotheses = decode_corpus(decoder, sources);
  write_sentences(hypotheses, run_dir / "test.hyp");

  const SynonymIndex synonyms(metric_synonyms);
  const EvalScores scores = evaluate(hypotheses, references, &synonyms);

  RunRow row;
  row.direction = direction.str();
  row.config = name;
  row.tuning = config.tuning;
  row.bleu = scores.bleu;
  row.meteor = scores.meteor;
  row.ter = scores.ter;
  row.oov_tokens = count_oov(sources, table);
  for (const auto& s : sources) row.test_tokens += s.size();
  row.run_id = run_id;
  row.phrase_table_hash = hex64(fnv1a(table_dump));
  row.lm_hash = hex64(fnv1a(lm_dump));
  if (!paths.subjective_dir.empty()) {
    const fs::path ratings = paths.subjective_dir / (direction.str() + "." + name + "." +
                                                     (config.tuning ? "on" : "off") + ".tsv");
    if (fs::exists(ratings)) row.subjective = aggregate_subjective(load_subjective(ratings));
  }
  write_file(run_dir / "scores.tsv", report_csv({row}));

  const auto elapsed = std::chrono::steady_clock::now() - started;
  return {row, std::chrono::duration<double>(elapsed).count()};
}

MatrixConfig MatrixConfig::parse(std::string_view text, const fs::path& base_dir) {
  MatrixConfig matrix;
  matrix.directions = {matrix.base.corpus_direction, matrix.base.corpus_direction.reversed()};
  matrix.configs = ladder_names();
  matrix.tuning = {false, true};
  auto& base = matrix.base;
  auto& params = base.params;
  bool directions_set = false;

  auto path = [&base_dir](std::string_view value) {
    fs::path p{std::string(value)};
    return p.is_absolute() ? p : base_dir / p;
  };
  auto integer = [](std::string_view value, std::string_view key) {
    try {
      return parse_int(value, key);
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
  };
  auto real = [](std::string_view value, std::string_view key) {
    try {
      return parse_double(value, key);
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
  };
  auto count = [&integer](std::string_view value, std::string_view key) {
    const long long v = integer(value, key);
    if (v < 0) throw ConfigError(std::string(key) + " must not be negative");
    return static_cast<std::size_t>(v);
  };

  std::size_t line_no = 0;
  for (const auto& raw : split_fields(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("matrix line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));

    if (key == "train_manifest") {
      base.paths.train_manifest = path(value);
    } else if (key == "patches") {
      base.paths.patches = path(value);
    } else if (key == "rules") {
      base.paths.rules = path(value);
    } else if (key == "synsets") {
      base.paths.synsets = path(value);
    } else if (key == "function_kridanta") {
      base.paths.function_kridanta = path(value);
    } else if (key == "verb_phrases") {
      base.paths.verb_phrases = path(value);
    } else if (key == "tune_source") {
      base.paths.tune_source = path(value);
    } else if (key == "tune_target") {
      base.paths.tune_target = path(value);
    } else if (key == "test_source") {
      base.paths.test_source = path(value);
    } else if (key == "test_target") {
      base.paths.test_target = path(value);
    } else if (key == "subjective_dir") {
      base.paths.subjective_dir = path(value);
    } else if (key == "corpus_direction") {
      base.corpus_direction = Direction::parse(value);
    } else if (key == "resource_direction") {
      base.resource_direction = Direction::parse(value);
    } else if (key == "split_language") {
      base.split_language = value;
    } else if (key == "directions") {
      matrix.directions.clear();
      for (const auto& item : parse_list(value)) matrix.directions.push_back(Direction::parse(item));
      directions_set = true;
    } else if (key == "configs") {
      matrix.configs = parse_list(value);
      for (const auto& c : matrix.configs) ladder_index(c);
    } else if (key == "tuning") {
      matrix.tuning.clear();
      for (const auto& item : parse_list(value)) matrix.tuning.push_back(parse_bool(item, key));
    } else if (key == "seed") {
      base.seed = static_cast<std::uint64_t>(count(value, key));
    } else if (key == "assert_ladder") {
      matrix.assert_ladder = parse_bool(value, key);
    } else if (key == "jobs") {
      matrix.jobs = std::max<std::size_t>(1, count(value, key));
    } else if (key == "max_length") {
      params.clean.max_length = count(value, key);
    } else if (key == "max_ratio") {
      params.clean.max_ratio = real(value, key);
    } else if (key == "model1_iterations") {
      params.model1.iterations = static_cast<int>(count(value, key));
    } else if (key == "heuristic") {
      try {
        params.heuristic = parse_heuristic(value);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "max_phrase_len") {
      params.max_phrase_len = static_cast<int>(count(value, key));
    } else if (key == "lm_order") {
      params.lm.order = static_cast<int>(count(value, key));
    } else if (key == "lm_lambda") {
      params.lm.lambda = real(value, key);
    } else if (key == "lm_unknown_floor") {
      params.lm.unknown_floor = real(value, key);
    } else if (key == "beam") {
      params.decoder.beam = count(value, key);
    } else if (key == "distortion_limit") {
      params.decoder.distortion_limit = static_cast<int>(integer(value, key));
    } else if (key == "options_limit") {
      params.decoder.options_limit = count(value, key);
    } else if (key == "mert_iterations") {
      params.mert.iterations = count(value, key);
    } else if (key == "nbest") {
      params.mert.nbest = count(value, key);
    } else if (key == "restarts") {
      params.mert.restarts = count(value, key);
    } else if (key == "max_sweeps") {
      params.mert.max_sweeps = count(value, key);
    } else if (key == "weights") {
      params.initial = WeightVector::load(path(value));
    } else if (key == "augment_repeat") {
      params.augment_repeat = count(value, key);
    } else {
      throw ConfigError("unknown matrix key '" + key + "'");
    }
  }
  if (!directions_set) {
    matrix.directions = {base.corpus_direction, base.corpus_direction.reversed()};
  }
  if (matrix.directions.empty() || matrix.configs.empty() || matrix.tuning.empty()) {
    throw ConfigError("matrix needs at least one direction, configuration and tuning state");
  }
  try {
    params.clean.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return matrix;
}

MatrixConfig MatrixConfig::load(const fs::path& file) {
  return parse(read_file(file), file.parent_path());
}

std::vector<ExperimentConfig> MatrixConfig::expand() const {
  std::vector<ExperimentConfig> out;
  for (const auto& direction : directions) {
    for (const auto& name : configs) {
      for (bool tune : tuning) {
        ExperimentConfig config = base;
        config.direction = direction;
        config.stages = ladder_stages(name);
        config.tuning = tune;
        out.push_back(std::move(config));
      }
    }
  }
  return out;
}

MatrixResult run_matrix(const MatrixConfig& matrix, const fs::path& out_dir) {
  const auto configs = matrix.expand();
  // Fail on configuration problems before any run starts training.
  for (const auto& config : configs) check_inputs(config);

  std::vector<RunOutcome> outcomes(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        outcomes[i] = run_pipeline(configs[i], out_dir);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(matrix.jobs, configs.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  MatrixResult result;
  std::string timings = "run_id\tdirection\tconfig\ttuning\tseconds\n";
  for (const auto& outcome : outcomes) {
    result.rows.push_back(outcome.row);
    result.seconds.push_back(outcome.seconds);
    timings += outcome.row.run_id + '\t' + outcome.row.direction + '\t' + outcome.row.config +
               '\t' + (outcome.row.tuning ? "on" : "off") + '\t' + fixed(outcome.seconds, 3) +
               '\n';
  }
  emit_report(result.rows, out_dir);
  write_file(out_dir / "timings.tsv", timings);
  if (matrix.assert_ladder) check_ladder(result.rows);
  return result;
}

namespace {

std::vector<RunRow> sorted_rows(const std::vector<RunRow>& rows) {
  std::vector<std::string> direction_order;
  for (const auto& row : rows) {
    if (std::find(direction_order.begin(), direction_order.end(), row.direction) ==
        direction_order.end()) {
      direction_order.push_back(row.direction);
    }
  }
  auto key = [&](const RunRow& row) {
    const auto d = std::find(direction_order.begin(), direction_order.end(), row.direction) -
                   direction_order.begin();
    return std::tuple{d, ladder_index(row.config), row.tuning};
  };
  std::vector<RunRow> out = rows;
  std::stable_sort(out.begin(), out.end(),
                   [&](const RunRow& a, const RunRow& b) { return key(a) < key(b); });
  return out;
}

bool any_subjective(const std::vector<RunRow>& rows) {
  return std::any_of(rows.begin(), rows.end(),
                     [](const RunRow& row) { return row.subjective.has_value(); });
}

}  // namespace

void check_ladder(const std::vector<RunRow>& rows) {
  std::map<std::pair<std::string, bool>, std::vector<const RunRow*>> groups;
  for (const auto& row : rows) groups[{row.direction, row.tuning}].push_back(&row);
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(), [](const RunRow* a, const RunRow* b) {
      return ladder_index(a->config) < ladder_index(b->config);
    });
    for (std::size_t i = 1; i < group.size(); ++i) {
      if (group[i]->oov_rate() > group[i - 1]->oov_rate()) {
        throw LadderError("OOV rate rose from " + group[i - 1]->config + " (" +
                          format_double(group[i - 1]->oov_rate()) + ") to " + group[i]->config +
                          " (" + format_double(group[i]->oov_rate()) + ") for " + key.first +
                          (key.second ? " with" : " without") + " tuning");
      }
    }
  }
}

std::string report_csv(const std::vector<RunRow>& rows) {
  const bool subjective = any_subjective(rows);
  std::string out = "direction,config,tuning,bleu,meteor,ter,oov_rate,oov_tokens,test_tokens";
  if (subjective) out += ",adequacy,fluency";
  out += ",run_id,phrase_table_hash,lm_hash\n";
  for (const auto& row : sorted_rows(rows)) {
    out += row.direction + ',' + row.config + ',' + (row.tuning ? "on" : "off") + ',' +
           format_double(row.bleu) + ',' + format_double(row.meteor) + ',' +
           format_double(row.ter) + ',' + format_double(row.oov_rate()) + ',' +
           std::to_string(row.oov_tokens) + ',' + std::to_string(row.test_tokens);
    if (subjective) {
      if (row.subjective) {
        out += ',' + format_double(row.subjective->adequacy_percent) + ',' +
               format_double(row.subjective->fluency_percent);
      } else {
        out += ",,";
      }
    }
    out += ',' + row.run_id + ',' + row.phrase_table_hash + ',' + row.lm_hash + '\n';
  }
  return out;
}

std::string report_markdown(const std::vector<RunRow>& rows) {
  const bool subjective = any_subjective(rows);
  const auto sorted = sorted_rows(rows);
  std::string out = "# Results\n";
  std::string current;
  for (const auto& row : sorted) {
    if (row.direction != current) {
      current = row.direction;
      out += "\n## " + current + "\n\n| Configuration | Tuning | BLEU | METEOR | TER | OOV % |";
      if (subjective) out += " Adequacy | Fluency |";
      out += "\n|---|---|---:|---:|---:|---:|";
      if (subjective) out += "---:|---:|";
      out += '\n';
    }
    out += "| " + row.config + " | " + (row.tuning ? "with" : "without") + " | " +
           fixed(row.bleu, 2) + " | " + fixed(row.meteor, 4) + " | " + fixed(row.ter, 2) +
           " | " + fixed(100.0 * row.oov_rate(), 2) + " |";
    if (subjective) {
      if (row.subjective) {
        out += ' ' + format_percent(row.subjective->adequacy_percent) + " | " +
               format_percent(row.subjective->fluency_percent) + " |";
      } else {
        out += " - | - |";
      }
    }
    out += '\n';
  }
  return out;
}

void emit_report(const std::vector<RunRow>& rows, const fs::path& out_dir) {
  if (rows.empty()) throw ContractError("no rows to report");
  write_file(out_dir / "report.csv", report_csv(rows));
  write_file(out_dir / "report.md", report_markdown(rows));

  using Getter = double (*)(const RunRow&);
  const std::vector<std::pair<std::string, Getter>> metrics = {
      {"bleu", [](const RunRow& r) { return r.bleu; }},
      {"meteor", [](const RunRow& r) { return r.meteor; }},
      {"ter", [](const RunRow& r) { return r.ter; }},
      {"oov", [](const RunRow& r) { return 100.0 * r.oov_rate(); }},
  };
  const auto sorted = sorted_rows(rows);
  std::vector<std::string> directions;
  for (const auto& row : sorted) {
    if (directions.empty() || directions.back() != row.direction) directions.push_back(row.direction);
  }
  for (const auto& direction : directions) {
    for (const auto& [metric, get] : metrics) {
      std::string out = "index\tconfig\twithout_tuning\twith_tuning\n";
      const auto& names = ladder_names();
      for (std::size_t i = 0; i < names.size(); ++i) {
        const RunRow* off = nullptr;
        const RunRow* on = nullptr;
        for (const auto& row : sorted) {
          if (row.direction != direction || row.config != names[i]) continue;
          (row.tuning ? on : off) = &row;
        }
        if (off == nullptr && on == nullptr) continue;
        out += std::to_string(i + 1) + '\t' + names[i] + '\t' +
               (off ? format_double(get(*off)) : "-") + '\t' +
               (on ? format_double(get(*on)) : "-") + '\n';
      }
      write_file(out_dir / "series" / (direction + "." + metric + ".tsv"), out);
    }
  }
}

}  // namespace lexsmt

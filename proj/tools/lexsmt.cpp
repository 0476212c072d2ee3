#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lexsmt/align.hpp"
#include "lexsmt/corpus.hpp"
#include "lexsmt/decoder.hpp"
#include "lexsmt/error.hpp"
#include "lexsmt/eval.hpp"
#include "lexsmt/experiment.hpp"
#include "lexsmt/lexicon.hpp"
#include "lexsmt/lm.hpp"
#include "lexsmt/mert.hpp"
#include "lexsmt/morph.hpp"
#include "lexsmt/phrase.hpp"

namespace fs = std::filesystem;
using namespace lexsmt;

namespace {

std::vector<Tokens> read_input(const std::string& path) {
  if (!path.empty() && path != "-") return read_sentences(path);
  std::vector<Tokens> out;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(normalize_tokens(line));
  }
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

ParallelCorpus load_training(const std::string& corpus_dir, const std::string& manifest) {
  if (!manifest.empty()) return ingest_manifest(manifest);
  return read_corpus_dir(corpus_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexsmt: phrase-based SMT toolkit for resource-augmented experiments"};
  app.require_subcommand(1);

  // clean
  std::string clean_dir, clean_manifest, clean_src, clean_tgt, clean_patches, clean_out;
  CleanConfig clean_config;
  auto* clean = app.add_subcommand("clean", "Apply patches and drop bad pairs");
  auto* clean_in = clean->add_option("--corpus", clean_dir, "Corpus directory");
  auto* clean_man =
      clean->add_option("--manifest", clean_manifest, "Corpus manifest TSV")->excludes(clean_in);
  auto* clean_s = clean->add_option("--src", clean_src, "Source file")->excludes(clean_in, clean_man);
  clean->add_option("--tgt", clean_tgt, "Target file")->needs(clean_s);
  clean->add_option("--patches", clean_patches, "Patch TSV");
  clean->add_option("--max-len", clean_config.max_length, "Longest side in tokens");
  clean->add_option("--max-ratio", clean_config.max_ratio, "Largest length ratio");
  clean->add_option("--out", clean_out, "Output corpus directory")->required();

  // split
  std::string split_rules, split_in, split_out, split_side;
  auto* split = app.add_subcommand("split", "Split suffixes off tokens");
  split->add_option("--rules", split_rules, "Rule TSV")->required();
  split->add_option("--side", split_side, "src | tgt: --in and --out are corpus directories");
  split->add_option("--in", split_in, "Input file or corpus directory (default stdin)");
  split->add_option("--out", split_out, "Output file or corpus directory (default stdout)");

  // augment
  std::string aug_corpus, aug_synsets, aug_fk, aug_vp, aug_out;
  std::vector<std::string> aug_pairs;
  bool aug_reverse = false;
  std::size_t aug_repeat = 1;
  auto* augment = app.add_subcommand("augment", "Append lexical resources to a corpus");
  augment->add_option("--corpus", aug_corpus, "Corpus directory")->required();
  augment->add_option("--synsets", aug_synsets, "Synset TSV");
  augment->add_option("--function-kridanta", aug_fk, "Function word / kridanta pairs");
  augment->add_option("--verb-phrases", aug_vp, "Verb phrase pairs");
  augment->add_option("--pairs", aug_pairs, "Pair resource as FILE:category (repeatable)");
  augment->add_flag("--reverse", aug_reverse, "Swap the resource sides first");
  augment->add_option("--repeat", aug_repeat, "Copies of each entry");
  augment->add_option("--out", aug_out, "Output corpus directory")->required();

  // train
  std::string train_corpus, train_manifest, train_out, train_heuristic = "grow-diag-final-and";
  Model1Options model1;
  int max_phrase_len = 5;
  auto* train = app.add_subcommand("train", "Align and build a phrase table");
  auto* train_in = train->add_option("--corpus", train_corpus, "Corpus directory");
  train->add_option("--manifest", train_manifest, "Corpus manifest TSV")->excludes(train_in);
  train->add_option("--iterations", model1.iterations, "Model 1 EM iterations");
  train->add_option("--threads", model1.threads, "E-step threads");
  train->add_option("--heuristic", train_heuristic,
                    "intersection | union | grow-diag-final-and");
  train->add_option("--max-phrase-len", max_phrase_len, "Longest phrase side");
  train->add_option("--out", train_out, "Model directory")->required();

  // lm
  std::string lm_text, lm_out;
  LmOptions lm_options;
  auto* lm = app.add_subcommand("lm", "Train an n-gram language model");
  lm->add_option("--text", lm_text, "Tokenized target text")->required();
  lm->add_option("--order", lm_options.order, "N-gram order");
  lm->add_option("--lambda", lm_options.lambda, "Interpolation weight");
  lm->add_option("--unknown-floor", lm_options.unknown_floor, "Unknown word probability");
  lm->add_option("--out", lm_out, "Model file")->required();

  // decode
  std::string dec_table, dec_lm, dec_weights, dec_in, dec_out, dec_nbest_out;
  DecoderConfig dec_config;
  std::size_t dec_nbest = 1;
  std::size_t dec_threads = 1;
  auto* decode = app.add_subcommand("decode", "Translate tokenized sentences");
  decode->add_option("--table", dec_table, "Phrase table")->required();
  decode->add_option("--lm", dec_lm, "Language model")->required();
  decode->add_option("--weights", dec_weights, "Weights file (default weights otherwise)");
  decode->add_option("--beam", dec_config.beam, "Stack size");
  decode->add_option("--dlimit", dec_config.distortion_limit, "Distortion limit; -1 for none");
  decode->add_option("--options-limit", dec_config.options_limit, "Options per span; 0 for all");
  decode->add_flag("--mark-unk", dec_config.mark_unk, "Render unknown words as |UNK|");
  decode->add_option("--in", dec_in, "Input (default stdin)");
  decode->add_option("--out", dec_out, "Output (default stdout)");
  decode->add_option("--nbest", dec_nbest, "N-best size");
  decode->add_option("--nbest-out", dec_nbest_out, "N-best file");
  decode->add_option("--threads", dec_threads, "Sentences decoded in parallel");

  // tune
  std::string tune_table, tune_lm, tune_src, tune_ref, tune_init, tune_out, tune_trace;
  MertOptions mert;
  DecoderConfig tune_decoder;
  auto* tune = app.add_subcommand("tune", "MERT on a tuning set");
  tune->add_option("--table", tune_table, "Phrase table")->required();
  tune->add_option("--lm", tune_lm, "Language model")->required();
  tune->add_option("--tune-src", tune_src, "Tuning source")->required();
  tune->add_option("--tune-ref", tune_ref, "Tuning reference")->required();
  tune->add_option("--weights", tune_init, "Initial weights");
  tune->add_option("--iters", mert.iterations, "Outer iterations");
  tune->add_option("--nbest", mert.nbest, "N-best size");
  tune->add_option("--restarts", mert.restarts, "Random restarts per iteration");
  tune->add_option("--seed", mert.seed, "Random seed");
  tune->add_option("--threads", mert.threads, "Decoding threads");
  tune->add_option("--beam", tune_decoder.beam, "Stack size");
  tune->add_option("--dlimit", tune_decoder.distortion_limit, "Distortion limit");
  tune->add_option("--out", tune_out, "Tuned weights file")->required();
  tune->add_option("--trace", tune_trace, "Trace CSV");

  // eval
  std::string ev_hyp, ev_ref, ev_synsets, ev_subjective, ev_out;
  std::size_t ev_bootstrap = 0;
  std::uint64_t ev_seed = 1;
  bool ev_no_shifts = false;
  auto* eval = app.add_subcommand("eval", "Score hypotheses against references");
  eval->add_option("--hyp", ev_hyp, "Hypotheses");
  eval->add_option("--ref", ev_ref, "References");
  eval->add_option("--synsets", ev_synsets, "Synset TSV for METEOR synonym matching");
  eval->add_option("--subjective", ev_subjective, "Ratings TSV id, adequacy, fluency");
  eval->add_option("--bootstrap", ev_bootstrap, "BLEU bootstrap resamples");
  eval->add_option("--seed", ev_seed, "Bootstrap seed");
  eval->add_flag("--no-shifts", ev_no_shifts, "TER without block shifts");
  eval->add_option("--out", ev_out, "Directory for scores.csv");

  // experiment
  std::string ex_matrix, ex_out;
  std::size_t ex_jobs = 0;
  auto* experiment = app.add_subcommand("experiment", "Run the configuration matrix");
  experiment->add_option("--matrix", ex_matrix, "Matrix file")->required();
  experiment->add_option("--out", ex_out, "Output directory")->required();
  experiment->add_option("--jobs", ex_jobs, "Concurrent runs (overrides the matrix)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*clean) {
      if (!clean_src.empty() && clean_tgt.empty()) throw ConfigError("--src needs --tgt");
      ParallelCorpus corpus = clean_src.empty() ? load_training(clean_dir, clean_manifest)
                                                : ingest_parallel(clean_src, clean_tgt, "corpus");
      const PatchSet patches = clean_patches.empty() ? PatchSet{} : PatchSet::load(clean_patches);
      clean_config.validate();
      const auto result = clean_corpus(corpus, patches, clean_config);
      write_corpus_dir(result.corpus, clean_out);
      write_file(fs::path(clean_out) / "clean_report.tsv", result.report.to_tsv());
      std::cerr << result.report.to_tsv();
    } else if (*split) {
      const SuffixTable table = SuffixTable::load(split_rules);
      if (!split_side.empty()) {
        if (split_in.empty() || split_out.empty()) {
          throw ConfigError("--side needs --in and --out corpus directories");
        }
        write_corpus_dir(split_corpus(read_corpus_dir(split_in), table, parse_side(split_side)),
                         split_out);
        return 0;
      }
      std::string out;
      for (const auto& sentence : read_input(split_in)) {
        out += join(split_tokens(sentence, table));
        out += '\n';
      }
      write_output(split_out, out);
    } else if (*augment) {
      ParallelCorpus corpus = read_corpus_dir(aug_corpus);
      ResourceSet resources;
      if (!aug_synsets.empty()) resources.merge(load_synsets(aug_synsets));
      if (!aug_fk.empty()) resources.merge(load_pair_resource(aug_fk, Category::function_word));
      if (!aug_vp.empty()) resources.merge(load_pair_resource(aug_vp, Category::verb_phrase));
      for (const auto& spec : aug_pairs) {
        const auto colon = spec.rfind(':');
        if (colon == std::string::npos) throw ConfigError("--pairs expects FILE:category");
        resources.merge(load_pair_resource(spec.substr(0, colon),
                                           parse_category(spec.substr(colon + 1))));
      }
      if (aug_reverse) resources = resources.reversed();
      write_corpus_dir(augment_corpus(corpus, resources, aug_repeat), aug_out);
    } else if (*train) {
      const ParallelCorpus corpus = load_training(train_corpus, train_manifest);
      const fs::path out(train_out);
      const auto forward = train_model1(corpus, model1);
      const auto backward = train_model1(swap_sides(corpus), model1);
      forward.table.write(out / "model1.forward.tsv");
      backward.table.write(out / "model1.backward.tsv");
      const auto alignments =
          align_corpus(corpus, forward.table, backward.table, parse_heuristic(train_heuristic));
      write_alignments(alignments, out / "alignments.txt");
      score_phrase_table(extract_corpus(corpus, alignments, max_phrase_len), forward.table,
                         backward.table)
          .write(out / "phrase_table.txt");
    } else if (*lm) {
      train_lm(read_sentences(lm_text), lm_options).write(lm_out);
    } else if (*decode) {
      const PhraseTable table = PhraseTable::load(dec_table);
      const NGramModel model = NGramModel::load(dec_lm);
      const WeightVector weights =
          dec_weights.empty() ? WeightVector::defaults() : WeightVector::load(dec_weights);
      const Decoder decoder(table, model, weights, dec_config);
      const auto sentences = read_input(dec_in);
      const auto nbest = decode_corpus_nbest(decoder, sentences, std::max<std::size_t>(1, dec_nbest),
                                             dec_threads);
      std::string out;
      std::string nbest_text;
      for (std::size_t i = 0; i < nbest.size(); ++i) {
        out += join(nbest[i].front().tokens);
        out += '\n';
        for (const auto& entry : nbest[i]) nbest_text += nbest_line(i, entry) + '\n';
      }
      write_output(dec_out, out);
      if (!dec_nbest_out.empty()) write_file(dec_nbest_out, nbest_text);
    } else if (*tune) {
      const PhraseTable table = PhraseTable::load(tune_table);
      const NGramModel model = NGramModel::load(tune_lm);
      const WeightVector initial =
          tune_init.empty() ? WeightVector::defaults() : WeightVector::load(tune_init);
      const auto corpus = ingest_parallel(tune_src, tune_ref, "tune");
      const auto result =
          tune_weights(corpus.sources(), corpus.targets(), table, model, initial, tune_decoder, mert);
      result.weights.write(tune_out);
      if (!tune_trace.empty()) write_file(tune_trace, trace_csv(result.trace));
    } else if (*eval) {
      using nlohmann::json;
      std::vector<json> records;
      std::string csv = "metric,value\n";
      if (!ev_hyp.empty() || !ev_ref.empty()) {
        if (ev_hyp.empty() || ev_ref.empty()) throw ConfigError("--hyp and --ref go together");
        const auto hyps = read_sentences(ev_hyp);
        const auto refs = read_sentences(ev_ref);
        const ResourceSet synsets = ev_synsets.empty() ? ResourceSet{} : load_synsets(ev_synsets);
        const SynonymIndex synonyms(synsets);
        if (hyps.size() != refs.size()) {
          throw ContractError("hypothesis count " + std::to_string(hyps.size()) +
                              " does not match reference count " + std::to_string(refs.size()));
        }
        TerOptions ter_options;
        ter_options.shifts = !ev_no_shifts;
        const auto b = bleu(hyps, refs);
        MeteorStats meteor;
        TerStats ter;
        for (std::size_t i = 0; i < hyps.size(); ++i) {
          meteor += meteor_stats(hyps[i], refs[i], &synonyms);
          ter += ter_stats(hyps[i], refs[i], ter_options);
        }
        json bleu_record = {{"metric", "bleu"},
                            {"value", b.score},
                            {"brevity_penalty", b.brevity_penalty},
                            {"precisions", b.precisions},
                            {"hyp_length", b.stats.hyp_length},
                            {"ref_length", b.stats.ref_length}};
        if (ev_bootstrap > 0) {
          const auto ci = bootstrap_bleu(hyps, refs, ev_bootstrap, ev_seed);
          bleu_record["ci95"] = {ci.low, ci.high};
        }
        records.push_back(bleu_record);
        records.push_back({{"metric", "meteor"},
                           {"value", meteor_from_stats(meteor)},
                           {"matches", meteor.matches},
                           {"chunks", meteor.chunks}});
        const double ter_value = ter.ref_length == 0 ? 0.0 : ter_from_stats(ter);
        records.push_back({{"metric", "ter"},
                           {"value", ter_value},
                           {"edits", ter.edits},
                           {"shifts", ter.shifts},
                           {"ref_length", ter.ref_length}});
        csv += "bleu," + format_double(b.score) + "\nmeteor," +
               format_double(meteor_from_stats(meteor)) + "\nter," + format_double(ter_value) + '\n';
      }
      if (!ev_subjective.empty()) {
        const auto summary = aggregate_subjective(load_subjective(ev_subjective));
        records.push_back({{"metric", "adequacy"},
                           {"value", summary.adequacy_percent},
                           {"display", format_percent(summary.adequacy_percent)}});
        records.push_back({{"metric", "fluency"},
                           {"value", summary.fluency_percent},
                           {"display", format_percent(summary.fluency_percent)}});
        csv += "adequacy," + format_double(summary.adequacy_percent) + "\nfluency," +
               format_double(summary.fluency_percent) + '\n';
      }
      if (records.empty()) throw ConfigError("nothing to evaluate: give --hyp/--ref or --subjective");
      for (const auto& record : records) std::cout << record.dump() << '\n';
      if (!ev_out.empty()) write_file(fs::path(ev_out) / "scores.csv", csv);
    } else if (*experiment) {
      MatrixConfig matrix = MatrixConfig::load(ex_matrix);
      if (ex_jobs > 0) matrix.jobs = ex_jobs;
      const auto result = run_matrix(matrix, ex_out);
      std::cout << report_markdown(result.rows);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

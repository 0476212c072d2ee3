#include "lexsmt/decoder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "lexsmt/error.hpp"

namespace lexsmt {

namespace {

constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "p_t_given_s", "p_s_given_t", "lex_t_given_s", "lex_s_given_t",
    "lm",          "word_penalty", "distortion"};

// Bound on lattice pops per requested n-best entry, so pathological lattices
// with many derivations per string still terminate.
constexpr std::size_t kPopsPerEntry = 2000;
constexpr std::size_t kMinPops = 20000;
// Scores this close are equal up to summation order and tie on the string.
constexpr double kTieTolerance = 1e-9;

double tie_slack(double score) { return kTieTolerance * std::max(1.0, std::abs(score)); }

// Sorts by score descending, then orders each run of near-equal scores by
// tokens. Runs are anchored at their first (highest) score.
void sort_nbest(std::vector<Translation>& results) {
  std::stable_sort(results.begin(), results.end(),
                   [](const Translation& a, const Translation& b) { return a.score > b.score; });
  for (std::size_t begin = 0; begin < results.size();) {
    std::size_t end = begin + 1;
    const double floor = results[begin].score - tie_slack(results[begin].score);
    while (end < results.size() && results[end].score >= floor) ++end;
    std::sort(results.begin() + begin, results.begin() + end,
              [](const Translation& a, const Translation& b) { return a.tokens < b.tokens; });
    begin = end;
  }
}

using Id = NGramModel::Id;

struct Arc {
  int prev = -1;
  int option = -1;
  FeatureVector delta{};
  double delta_score = 0.0;
};

struct Node {
  std::vector<bool> coverage;
  std::vector<Id> lm_state;
  int last_end = 0;
  int covered = 0;
  double score = 0.0;
  double future = 0.0;
  std::vector<Arc> arcs;
};

std::string state_key(const std::vector<bool>& coverage, const std::vector<Id>& lm_state,
                      int last_end) {
  std::string key;
  key.reserve(coverage.size() + lm_state.size() * 4 + 4);
  for (bool bit : coverage) key.push_back(bit ? '1' : '0');
  auto put = [&key](std::uint32_t value) {
    for (int i = 0; i < 4; ++i) key.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  };
  for (Id id : lm_state) put(id);
  put(static_cast<std::uint32_t>(last_end));
  return key;
}

double safe_log(double p) { return std::log(std::max(p, std::numeric_limits<double>::min())); }

}  // namespace

std::string_view feature_name(std::size_t index) {
  if (index >= kNumFeatures) throw ContractError("feature index out of range");
  return kFeatureNames[index];
}

WeightVector WeightVector::defaults() {
  return WeightVector{{0.2, 0.2, 0.2, 0.2, 0.5, -0.3, 0.3}};
}

double WeightVector::dot(const FeatureVector& features) const {
  double total = 0.0;
  for (std::size_t i = 0; i < kNumFeatures; ++i) total += values[i] * features[i];
  return total;
}

void WeightVector::validate() const {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("weight " + std::string(kFeatureNames[i]) + " is not finite");
    }
  }
}

std::string WeightVector::dump() const {
  std::string out;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    out += kFeatureNames[i];
    out += ' ';
    out += format_double(values[i]);
    out += '\n';
  }
  return out;
}

void WeightVector::write(const std::filesystem::path& file) const { write_file(file, dump()); }

WeightVector WeightVector::parse(std::string_view text) {
  WeightVector weights;
  std::array<bool, kNumFeatures> seen{};
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto parts = split_spaces(trimmed);
    if (parts.size() != 2) {
      throw ParseError("weights line " + std::to_string(line_no) + ": expected 'name value'");
    }
    auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), parts[0]);
    if (it == kFeatureNames.end()) throw ParseError("unknown weight name '" + parts[0] + "'");
    const auto index = static_cast<std::size_t>(it - kFeatureNames.begin());
    if (seen[index]) throw ParseError("weight '" + parts[0] + "' given twice");
    seen[index] = true;
    weights.values[index] = parse_double(parts[1], parts[0]);
  }
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (!seen[i]) throw ParseError("weight '" + std::string(kFeatureNames[i]) + "' missing");
  }
  weights.validate();
  return weights;
}

WeightVector WeightVector::load(const std::filesystem::path& file) {
  return parse(read_file(file));
}

FeatureVector derivation_features(const std::vector<DerivationStep>& steps,
                                  const NGramModel& lm) {
  FeatureVector features{};
  int last_end = 0;
  for (const auto& step : steps) {
    for (std::size_t k = 0; k < 4; ++k) features[k] += step.tm[k];
    features[kWordPenalty] -= static_cast<double>(step.target.size());
    features[kDistortion] -= std::abs(step.source_start - last_end);
    last_end = step.source_end;
  }
  features[kLanguageModel] = lm.score_sequence(derivation_target(steps));
  return features;
}

Tokens derivation_target(const std::vector<DerivationStep>& steps) {
  Tokens out;
  for (const auto& step : steps) out.insert(out.end(), step.target.begin(), step.target.end());
  return out;
}

Decoder::Decoder(const PhraseTable& table, const NGramModel& lm, WeightVector weights,
                 DecoderConfig config)
    : table_(table), lm_(lm), weights_(weights), config_(config) {
  weights_.validate();
  if (config_.beam == 0) throw ContractError("beam must be >= 1");
}

std::vector<TranslationOption> Decoder::collect_options(const Tokens& sentence) const {
  std::vector<TranslationOption> options;
  const int n = static_cast<int>(sentence.size());
  const int longest = static_cast<int>(table_.max_source_length());
  auto estimate = [this](const TranslationOption& option) {
    double value = 0.0;
    for (std::size_t k = 0; k < 4; ++k) value += weights_.values[k] * option.tm[k];
    value -= weights_.values[kWordPenalty] * static_cast<double>(option.target.size());
    for (const auto& word : option.target) {
      value += weights_.values[kLanguageModel] * safe_log(lm_.unigram_prob(lm_.id(word)));
    }
    return value;
  };
  for (int start = 0; start < n; ++start) {
    bool has_single = false;
    for (int end = start + 1; end <= std::min(n, start + longest); ++end) {
      const Tokens source(sentence.begin() + start, sentence.begin() + end);
      const auto* entries = table_.lookup(source);
      if (entries == nullptr) continue;
      if (end == start + 1) has_single = true;
      std::vector<TranslationOption> span;
      for (const auto& entry : *entries) {
        TranslationOption option;
        option.source_start = start;
        option.source_end = end;
        option.target = entry.target;
        option.tm = {safe_log(entry.scores.p_target_given_source),
                     safe_log(entry.scores.p_source_given_target),
                     safe_log(entry.scores.lex_target_given_source),
                     safe_log(entry.scores.lex_source_given_target)};
        option.estimate = estimate(option);
        span.push_back(std::move(option));
      }
      std::stable_sort(span.begin(), span.end(), [](const auto& a, const auto& b) {
        if (a.estimate != b.estimate) return a.estimate > b.estimate;
        return a.target < b.target;
      });
      if (config_.options_limit > 0 && span.size() > config_.options_limit) {
        span.resize(config_.options_limit);
      }
      for (auto& option : span) options.push_back(std::move(option));
    }
    if (!has_single) {
      TranslationOption option;
      option.source_start = start;
      option.source_end = start + 1;
      option.target = {sentence[start]};
      option.tm.fill(std::log(kUnknownPhraseProb));
      option.unknown = true;
      option.estimate = estimate(option);
      options.push_back(std::move(option));
    }
  }
  return options;
}

std::vector<Translation> Decoder::search(const Tokens& sentence, std::size_t n,
                                         int distortion_limit, bool& complete) const {
  const int length = static_cast<int>(sentence.size());
  const auto options = collect_options(sentence);
  const std::size_t context = static_cast<std::size_t>(std::max(0, lm_.order() - 1));

  // future[i][j]: best estimate for covering [i, j).
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> future(length + 1, std::vector<double>(length + 1, neg_inf));
  for (const auto& option : options) {
    auto& cell = future[option.source_start][option.source_end];
    cell = std::max(cell, option.estimate);
  }
  for (int span = 2; span <= length; ++span) {
    for (int i = 0; i + span <= length; ++i) {
      const int j = i + span;
      for (int k = i + 1; k < j; ++k) future[i][j] = std::max(future[i][j], future[i][k] + future[k][j]);
    }
  }
  auto future_cost = [&](const std::vector<bool>& coverage) {
    double total = 0.0;
    int i = 0;
    while (i < length) {
      if (coverage[i]) {
        ++i;
        continue;
      }
      int j = i;
      while (j < length && !coverage[j]) ++j;
      total += future[i][j];
      i = j;
    }
    return total;
  };

  std::vector<std::vector<int>> by_start(length);
  for (std::size_t o = 0; o < options.size(); ++o) {
    by_start[options[o].source_start].push_back(static_cast<int>(o));
  }

  std::vector<Node> nodes;
  std::vector<std::vector<int>> stacks(length + 1);
  std::vector<std::unordered_map<std::string, int>> index(length + 1);

  Node root;
  root.coverage.assign(length, false);
  root.lm_state.assign(context, NGramModel::kBos);
  root.future = future_cost(root.coverage);
  nodes.push_back(std::move(root));
  stacks[0].push_back(0);

  auto prune = [&](std::vector<int>& stack) {
    std::sort(stack.begin(), stack.end(), [&](int a, int b) {
      const double sa = nodes[a].score + nodes[a].future;
      const double sb = nodes[b].score + nodes[b].future;
      if (sa != sb) return sa > sb;
      return a < b;
    });
    if (stack.size() > config_.beam) stack.resize(config_.beam);
  };

  for (int k = 0; k < length; ++k) {
    prune(stacks[k]);
    for (int from : stacks[k]) {
      for (int start = 0; start < length; ++start) {
        if (nodes[from].coverage[start]) continue;
        const int jump = std::abs(start - nodes[from].last_end);
        if (distortion_limit >= 0 && jump > distortion_limit) continue;
        for (int o : by_start[start]) {
          const auto& option = options[o];
          bool free = true;
          for (int p = option.source_start; p < option.source_end; ++p) {
            if (nodes[from].coverage[p]) {
              free = false;
              break;
            }
          }
          if (!free) continue;
          std::vector<bool> coverage = nodes[from].coverage;
          for (int p = option.source_start; p < option.source_end; ++p) coverage[p] = true;
          const int covered = nodes[from].covered + (option.source_end - option.source_start);
          if (distortion_limit >= 0 && covered < length) {
            // Reject moves after which the first gap is out of reach.
            int gap = 0;
            while (gap < length && coverage[gap]) ++gap;
            if (gap < option.source_start && option.source_end - gap > distortion_limit) continue;
          }

          Arc arc;
          arc.prev = from;
          arc.option = o;
          for (std::size_t f = 0; f < 4; ++f) arc.delta[f] = option.tm[f];
          arc.delta[kWordPenalty] = -static_cast<double>(option.target.size());
          arc.delta[kDistortion] = -static_cast<double>(jump);
          std::vector<Id> state = nodes[from].lm_state;
          double lm = 0.0;
          auto advance = [&](Id word) {
            lm += lm_.log_prob(state, word);
            if (!state.empty()) {
              state.erase(state.begin());
              state.push_back(word);
            }
          };
          for (const auto& word : option.target) advance(lm_.id(word));
          if (covered == length) advance(NGramModel::kEos);
          arc.delta[kLanguageModel] = lm;
          arc.delta_score = weights_.dot(arc.delta);
          const double score = nodes[from].score + arc.delta_score;

          auto key = state_key(coverage, state, option.source_end);
          auto found = index[covered].find(key);
          if (found == index[covered].end()) {
            Node node;
            node.coverage = std::move(coverage);
            node.lm_state = std::move(state);
            node.last_end = option.source_end;
            node.covered = covered;
            node.score = score;
            node.future = future_cost(node.coverage);
            node.arcs.push_back(arc);
            const int id = static_cast<int>(nodes.size());
            nodes.push_back(std::move(node));
            index[covered].emplace(std::move(key), id);
            stacks[covered].push_back(id);
          } else {
            Node& node = nodes[found->second];
            if (score > node.score) node.score = score;
            node.arcs.push_back(arc);
          }
        }
      }
    }
  }
  prune(stacks[length]);
  complete = !stacks[length].empty();
  if (!complete) return {};

  // Best-first expansion backwards from the complete nodes. A partial path
  // holds the arcs from some node to the end; its priority is the node's best
  // inside score plus the path's suffix score.
  struct Partial {
    int node;
    int parent;
    int via_node;
    int via_arc;
    double suffix;
  };
  std::vector<Partial> partials;
  using Item = std::pair<double, int>;
  auto cmp = [](const Item& a, const Item& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> queue(cmp);
  for (int id : stacks[length]) {
    partials.push_back({id, -1, -1, -1, 0.0});
    queue.emplace(nodes[id].score, static_cast<int>(partials.size()) - 1);
  }

  std::vector<Translation> results;
  std::vector<double> priorities;
  std::set<Tokens> seen;
  const std::size_t max_pops = std::max(kMinPops, n * kPopsPerEntry);
  std::size_t pops = 0;
  while (!queue.empty() && pops < max_pops) {
    const auto [priority, pid] = queue.top();
    if (results.size() >= n && priority < priorities[n - 1] - tie_slack(priorities[n - 1])) break;
    queue.pop();
    ++pops;
    const Partial partial = partials[pid];
    if (partial.node != 0) {
      const auto& arcs = nodes[partial.node].arcs;
      for (std::size_t a = 0; a < arcs.size(); ++a) {
        const double suffix = partial.suffix + arcs[a].delta_score;
        partials.push_back({arcs[a].prev, pid, partial.node, static_cast<int>(a), suffix});
        queue.emplace(nodes[arcs[a].prev].score + suffix, static_cast<int>(partials.size()) - 1);
      }
      continue;
    }
    Translation translation;
    for (int p = pid; partials[p].parent >= 0; p = partials[p].parent) {
      const Arc& arc = nodes[partials[p].via_node].arcs[partials[p].via_arc];
      const auto& option = options[arc.option];
      for (std::size_t f = 0; f < kNumFeatures; ++f) translation.features[f] += arc.delta[f];
      translation.steps.push_back(
          {option.source_start, option.source_end, option.target, option.tm, option.unknown});
      for (const auto& word : option.target) {
        translation.tokens.push_back(option.unknown && config_.mark_unk ? kUnknownMarker : word);
      }
    }
    if (!seen.insert(translation.tokens).second) continue;
    translation.score = weights_.dot(translation.features);
    results.push_back(std::move(translation));
    priorities.push_back(priority);
  }
  sort_nbest(results);
  if (results.size() > n) results.resize(n);
  return results;
}

std::vector<Translation> Decoder::decode_nbest(const Tokens& sentence, std::size_t n) const {
  if (n == 0) throw ContractError("n-best size must be >= 1");
  if (sentence.empty()) {
    Translation empty;
    empty.features[kLanguageModel] = lm_.score_sequence({});
    empty.score = weights_.dot(empty.features);
    return {empty};
  }
  bool complete = false;
  auto results = search(sentence, n, config_.distortion_limit, complete);
  if (!complete) results = search(sentence, n, 0, complete);
  return results;
}

Translation Decoder::decode(const Tokens& sentence) const {
  return decode_nbest(sentence, 1).front();
}

std::vector<std::vector<Translation>> decode_corpus_nbest(const Decoder& decoder,
                                                          const std::vector<Tokens>& sentences,
                                                          std::size_t n, std::size_t threads) {
  std::vector<std::vector<Translation>> out(sentences.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sentences.size(); i = next++) {
      out[i] = decoder.decode_nbest(sentences[i], n);
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, sentences.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return out;
}

std::vector<Tokens> decode_corpus(const Decoder& decoder, const std::vector<Tokens>& sentences,
                                  std::size_t threads) {
  auto nbest = decode_corpus_nbest(decoder, sentences, 1, threads);
  std::vector<Tokens> out;
  out.reserve(nbest.size());
  for (auto& list : nbest) out.push_back(std::move(list.front().tokens));
  return out;
}

std::string nbest_line(std::size_t sentence_id, const Translation& translation) {
  std::string line = std::to_string(sentence_id) + " ||| " + join(translation.tokens) + " |||";
  for (double f : translation.features) line += " " + format_double(f);
  line += " ||| " + format_double(translation.score);
  return line;
}

NBestEntry parse_nbest_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(" ||| ", pos);
    if (next == std::string_view::npos) {
      fields.emplace_back(line.substr(pos));
      break;
    }
    fields.emplace_back(line.substr(pos, next - pos));
    pos = next + 5;
  }
  if (fields.size() != 4) throw ParseError("n-best line needs 4 fields: " + std::string(line));
  NBestEntry entry;
  entry.sentence_id = static_cast<std::size_t>(parse_int(fields[0], "sentence id"));
  entry.tokens = split_spaces(fields[1]);
  const auto values = split_spaces(fields[2]);
  if (values.size() != kNumFeatures) throw ParseError("n-best line needs 7 features");
  for (std::size_t i = 0; i < kNumFeatures; ++i) entry.features[i] = parse_double(values[i], "feature");
  entry.score = parse_double(fields[3], "score");
  return entry;
}

}  // namespace lexsmt

#include "lexsmt/lm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lexsmt/error.hpp"

namespace lexsmt {

namespace {

void validate(const LmOptions& options) {
  if (options.order < 1) throw TrainingError("LM order must be >= 1");
  if (!(options.lambda >= 0.0 && options.lambda <= 1.0)) {
    throw TrainingError("LM lambda must lie in [0, 1]");
  }
  if (!(options.unknown_floor > 0.0 && options.unknown_floor < 1.0)) {
    throw TrainingError("LM unknown floor must lie in (0, 1)");
  }
}

}  // namespace

NGramModel::Id NGramModel::intern(const std::string& word) {
  auto [it, inserted] = ids_.emplace(word, static_cast<Id>(words_.size()));
  if (inserted) words_.push_back(word);
  return it->second;
}

NGramModel::Id NGramModel::id(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? kUnknown : it->second;
}

std::vector<NGramModel::Id> NGramModel::vocabulary() const {
  std::vector<Id> out;
  for (Id i = kEos; i < words_.size(); ++i) out.push_back(i);
  return out;
}

void NGramModel::count_ngram(const std::u32string& key, std::uint64_t count) {
  const std::size_t n = key.size();
  counts_[n - 1][key] += count;
  history_counts_[n - 1][key.substr(0, n - 1)] += count;
  if (n == 1) unigram_total_ += count;
}

double NGramModel::unigram_prob(Id word) const {
  if (word == kUnknown || word == kBos || word >= words_.size()) return options_.unknown_floor;
  auto it = counts_[0].find(std::u32string(1, static_cast<char32_t>(word)));
  const double c = it == counts_[0].end() ? 0.0 : static_cast<double>(it->second);
  return (1.0 - options_.unknown_floor) * (c + 1.0) /
         (static_cast<double>(unigram_total_) + static_cast<double>(vocabulary_size_));
}

double NGramModel::interpolated(std::span<const Id> history, Id word, int n) const {
  if (n == 1) {
    auto it = counts_[0].find(std::u32string(1, static_cast<char32_t>(word)));
    const double c = it == counts_[0].end() ? 0.0 : static_cast<double>(it->second);
    return (c + 1.0) /
           (static_cast<double>(unigram_total_) + static_cast<double>(vocabulary_size_));
  }
  const double lower = interpolated(history, word, n - 1);
  // The last n-1 history ids, padded with <s> on the left.
  std::u32string key(static_cast<std::size_t>(n - 1), static_cast<char32_t>(kBos));
  const std::size_t take = std::min<std::size_t>(history.size(), n - 1);
  for (std::size_t k = 0; k < take; ++k) {
    key[n - 1 - take + k] = static_cast<char32_t>(history[history.size() - take + k]);
  }
  auto hist = history_counts_[n - 1].find(key);
  if (hist == history_counts_[n - 1].end() || hist->second == 0) return lower;
  key.push_back(static_cast<char32_t>(word));
  auto it = counts_[n - 1].find(key);
  const double c = it == counts_[n - 1].end() ? 0.0 : static_cast<double>(it->second);
  return options_.lambda * c / static_cast<double>(hist->second) + (1.0 - options_.lambda) * lower;
}

double NGramModel::prob(std::span<const Id> history, Id word) const {
  if (word == kUnknown || word == kBos || word >= words_.size()) return options_.unknown_floor;
  return (1.0 - options_.unknown_floor) * interpolated(history, word, options_.order);
}

double NGramModel::log_prob(std::span<const Id> history, Id word) const {
  return std::log(prob(history, word));
}

double NGramModel::score_sequence(const Tokens& tokens) const {
  std::vector<Id> context(static_cast<std::size_t>(std::max(0, options_.order - 1)), kBos);
  double total = 0.0;
  auto step = [&](Id w) {
    total += log_prob(context, w);
    if (!context.empty()) {
      context.erase(context.begin());
      context.push_back(w);
    }
  };
  for (const auto& t : tokens) step(id(t));
  step(kEos);
  return total;
}

NGramModel NGramModel::make_empty(const LmOptions& options) {
  validate(options);
  NGramModel model;
  model.options_ = options;
  model.intern("<unk>");
  model.intern(kBosToken);
  model.intern(kEosToken);
  model.counts_.assign(options.order, {});
  model.history_counts_.assign(options.order, {});
  return model;
}

std::string NGramModel::dump() const {
  std::ostringstream out;
  out << "#lexsmt-lm\torder=" << options_.order << "\tlambda=" << format_double(options_.lambda)
      << "\tunknown_floor=" << format_double(options_.unknown_floor) << "\n";
  for (int n = 1; n <= options_.order; ++n) {
    std::vector<std::pair<std::string, std::uint64_t>> rows;
    for (const auto& [key, count] : counts_[n - 1]) {
      std::string text;
      for (char32_t id : key) {
        if (!text.empty()) text += ' ';
        text += words_[id];
      }
      rows.emplace_back(std::move(text), count);
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& [text, count] : rows) out << n << '\t' << text << '\t' << count << '\n';
  }
  return out.str();
}

void NGramModel::write(const std::filesystem::path& file) const { write_file(file, dump()); }

NGramModel NGramModel::load(const std::filesystem::path& file) {
  const std::vector<std::string> lines = read_lines(file);
  if (lines.empty() || lines[0].rfind("#lexsmt-lm", 0) != 0) {
    throw ParseError(file.string() + ": missing #lexsmt-lm header");
  }
  LmOptions options;
  for (const std::string& field : split_fields(lines[0], '\t')) {
    auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "order") options.order = static_cast<int>(parse_int(value, "LM order"));
    if (key == "lambda") options.lambda = parse_double(value, "LM lambda");
    if (key == "unknown_floor") options.unknown_floor = parse_double(value, "LM unknown floor");
  }
  NGramModel model = make_empty(options);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = file.string() + ":" + std::to_string(i + 1);
    std::vector<std::string> fields = split_fields(lines[i], '\t');
    if (fields.size() != 3) throw ParseError(where + ": expected order<TAB>ngram<TAB>count");
    const long long n = parse_int(fields[0], "n-gram order at " + where);
    Tokens words = split_spaces(fields[1]);
    if (n < 1 || n > options.order || static_cast<long long>(words.size()) != n) {
      throw ParseError(where + ": n-gram does not match its order");
    }
    std::u32string key;
    for (const auto& w : words) key.push_back(static_cast<char32_t>(model.intern(w)));
    model.count_ngram(key, static_cast<std::uint64_t>(parse_int(fields[2], "count at " + where)));
  }
  model.vocabulary_size_ = model.counts_[0].size();
  return model;
}

NGramModel train_lm(const std::vector<Tokens>& sentences, const LmOptions& options) {
  if (sentences.empty()) throw TrainingError("cannot train an LM on an empty corpus");
  NGramModel model = NGramModel::make_empty(options);

  const std::size_t pad = static_cast<std::size_t>(options.order - 1);
  for (const Tokens& sentence : sentences) {
    std::vector<NGramModel::Id> ids(pad, NGramModel::kBos);
    for (const auto& w : sentence) ids.push_back(model.intern(w));
    ids.push_back(NGramModel::kEos);
    for (std::size_t pos = pad; pos < ids.size(); ++pos) {
      for (int n = 1; n <= options.order; ++n) {
        std::u32string key;
        for (std::size_t k = pos + 1 - n; k <= pos; ++k) key.push_back(static_cast<char32_t>(ids[k]));
        model.count_ngram(key, 1);
      }
    }
  }
  model.vocabulary_size_ = model.counts_[0].size();
  return model;
}

}  // namespace lexsmt

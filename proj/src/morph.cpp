#include "lexsmt/morph.hpp"

#include <algorithm>

#include "lexsmt/error.hpp"

namespace lexsmt {

SuffixTable::SuffixTable(std::vector<SuffixRule> rules, std::map<std::string, Tokens> exact)
    : rules_(std::move(rules)) {
  for (auto& [pattern, emit] : exact) {
    if (pattern.empty()) throw ValidationError("exact rule with empty pattern");
    if (emit.empty()) throw ValidationError("exact rule '" + pattern + "' emits nothing");
    exact_.emplace(pattern, std::move(emit));
  }

  std::sort(rules_.begin(), rules_.end(), [](const SuffixRule& a, const SuffixRule& b) {
    if (a.surface_suffix.size() != b.surface_suffix.size()) {
      return a.surface_suffix.size() > b.surface_suffix.size();
    }
    return a.surface_suffix < b.surface_suffix;
  });
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const SuffixRule& rule = rules_[i];
    if (rule.surface_suffix.empty()) throw ValidationError("suffix rule with empty suffix");
    if (rule.emit.empty()) {
      throw ValidationError("suffix rule '" + rule.surface_suffix + "' emits nothing");
    }
    if (rule.min_stem_len < 1) {
      throw ValidationError("suffix rule '" + rule.surface_suffix + "': min_stem_len < 1");
    }
    if (!by_suffix_.emplace(rule.surface_suffix, i).second) {
      throw ValidationError("duplicate suffix rule '" + rule.surface_suffix + "'");
    }
  }

  auto check_terminal = [this](const Tokens& emit, const std::string& owner) {
    for (const std::string& token : emit) {
      if (token.empty() || token.find(' ') != std::string::npos) {
        throw ValidationError("rule '" + owner + "' emits a malformed token");
      }
      if (split_token(token) != Tokens{token}) {
        throw ValidationError("rule '" + owner + "' emits '" + token +
                              "', which another rule would split again");
      }
    }
  };
  for (const SuffixRule& rule : rules_) check_terminal(rule.emit, rule.surface_suffix);
  for (const auto& [pattern, emit] : exact_) check_terminal(emit, pattern);
}

SuffixTable SuffixTable::load(const std::filesystem::path& file) {
  std::vector<SuffixRule> rules;
  std::map<std::string, Tokens> exact;
  const std::vector<std::string> lines = read_lines(file);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    const std::string where = file.string() + ":" + std::to_string(i + 1);
    std::vector<std::string> fields = split_fields(lines[i], '\t');
    if (fields.size() != 4) {
      throw ParseError(where + ": expected kind<TAB>pattern<TAB>emit<TAB>min_stem_len");
    }
    const std::string kind(trim(fields[0]));
    std::string pattern = to_nfc(trim(fields[1]));
    Tokens emit = split_spaces(to_nfc(trim(fields[2])));
    if (kind == "suffix") {
      long long min_stem = parse_int(fields[3], "min_stem_len at " + where);
      if (min_stem < 1) throw ValidationError(where + ": min_stem_len must be >= 1");
      rules.push_back(SuffixRule{std::move(pattern), std::move(emit),
                                 static_cast<std::size_t>(min_stem)});
    } else if (kind == "exact") {
      if (!exact.emplace(pattern, std::move(emit)).second) {
        throw ValidationError(where + ": duplicate exact rule '" + pattern + "'");
      }
    } else {
      throw ParseError(where + ": unknown rule kind '" + kind + "'");
    }
  }
  return SuffixTable(std::move(rules), std::move(exact));
}

Tokens SuffixTable::split_token(std::string_view token) const {
  if (auto it = exact_.find(token); it != exact_.end()) return it->second;

  // Walk code-point boundaries from the left so the first hit is the longest
  // suffix.
  for (std::size_t pos = 1; pos < token.size(); ++pos) {
    if ((static_cast<unsigned char>(token[pos]) & 0xC0) == 0x80) continue;
    auto it = by_suffix_.find(token.substr(pos));
    if (it == by_suffix_.end()) continue;
    const SuffixRule& rule = rules_[it->second];
    std::string_view stem = token.substr(0, pos);
    if (codepoint_count(stem) < rule.min_stem_len) break;
    Tokens out;
    out.reserve(rule.emit.size() + 1);
    out.emplace_back(stem);
    out.insert(out.end(), rule.emit.begin(), rule.emit.end());
    return out;
  }
  return Tokens{std::string(token)};
}

Tokens split_tokens(const Tokens& tokens, const SuffixTable& table) {
  Tokens out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) {
    Tokens pieces = table.split_token(token);
    out.insert(out.end(), std::make_move_iterator(pieces.begin()),
               std::make_move_iterator(pieces.end()));
  }
  return out;
}

ParallelCorpus split_corpus(const ParallelCorpus& corpus, const SuffixTable& table,
                            Side side) {
  ParallelCorpus out = corpus;
  for (SentencePair& pair : out.pairs) pair.side(side) = split_tokens(pair.side(side), table);
  return out;
}

}  // namespace lexsmt

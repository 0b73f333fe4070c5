#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tbrl/engine/concepts.hpp"
#include "tbrl/errors.hpp"
#include "tbrl/rng.hpp"
#include "tbrl/textenc/tokenize.hpp"

namespace tbrl::perturb {

// token -> ordered replacement tokens. Only the first replacement is used
// for substitution; the rest are kept for reference.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::map<std::string, std::vector<std::string>> entries)
      : entries_(std::move(entries)) {
    validate();
  }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }

  const std::string* first_choice(std::string_view token) const {
    auto it = entries_.find(std::string(token));
    return it == entries_.end() ? nullptr : &it->second.front();
  }

 private:
  void validate() const {
    for (const auto& [token, reps] : entries_) {
      if (!is_single_token(token)) throw ConfigError("lexicon key '" + token + "' is not a token");
      if (reps.empty()) throw ConfigError("lexicon entry '" + token + "' has no replacements");
      for (const std::string& r : reps) {
        if (!is_single_token(r)) {
          throw ConfigError("lexicon replacement '" + r + "' is not a single token");
        }
      }
      if (reps.front() == token) throw ConfigError("lexicon entry '" + token + "' maps to itself");
    }
    for (const auto& [token, reps] : entries_) {
      std::set<std::string> seen{token};
      for (const std::string* cur = &reps.front(); entries_.count(*cur) > 0; cur = first_choice(*cur)) {
        if (!seen.insert(*cur).second) throw ConfigError("lexicon cycle through '" + token + "'");
      }
    }
  }

  static bool is_single_token(const std::string& s) {
    const text::TokenSequence t = text::tokenize(s);
    return t.size() == 1 && t[0] == s;
  }

  std::map<std::string, std::vector<std::string>> entries_;
};

// "token<TAB>rep1,rep2,..." per line; blank lines are skipped.
inline Lexicon parse_lexicon(std::istream& in) {
  std::map<std::string, std::vector<std::string>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected token<TAB>replacements", line_no);
    const std::string token = line.substr(0, tab);
    std::vector<std::string> reps;
    std::stringstream ss(line.substr(tab + 1));
    std::string rep;
    while (std::getline(ss, rep, ',')) {
      if (rep.empty()) throw ParseError("empty replacement", line_no);
      reps.push_back(rep);
    }
    if (reps.empty()) throw ParseError("no replacements", line_no);
    if (!entries.emplace(token, std::move(reps)).second) {
      throw ParseError("duplicate lexicon entry '" + token + "'", line_no);
    }
  }
  return Lexicon(std::move(entries));
}

inline Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return parse_lexicon(in);
}

inline void write_lexicon(std::ostream& out, const Lexicon& lex) {
  for (const auto& [token, reps] : lex.entries()) {
    out << token << '\t';
    for (std::size_t i = 0; i < reps.size(); ++i) out << (i ? "," : "") << reps[i];
    out << '\n';
  }
}

// Every in-distribution surface name maps to its concept's held-out names.
inline Lexicon lexicon_from_pool(const engine::ConceptPool& pool) {
  std::map<std::string, std::vector<std::string>> entries;
  for (const engine::Concept& c : pool.concepts()) {
    for (const std::string& name : c.surface_names_id) entries[name] = c.surface_names_ood;
  }
  return Lexicon(std::move(entries));
}

// Tokenizes, swaps each covered token for its first replacement with
// probability `rate`, and joins with single spaces. The coin flips come from
// a stream keyed by (seed, text).
inline std::string lexical_substitute(std::string_view text, const Lexicon& lexicon, double rate,
                                      std::uint64_t seed) {
  if (!(rate > 0.0 && rate <= 1.0)) throw DomainError("substitution rate must be in (0, 1]");
  Rng rng(combine_seeds(seed, fnv1a(text)));
  std::string out;
  for (const std::string& token : text::tokenize(text)) {
    const std::string* rep = lexicon.first_choice(token);
    if (!out.empty()) out += ' ';
    out += (rep != nullptr && rng.uniform() < rate) ? *rep : token;
  }
  return out;
}

}  // namespace tbrl::perturb

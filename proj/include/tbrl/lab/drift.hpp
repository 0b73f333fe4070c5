#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tbrl/errors.hpp"
#include "tbrl/textenc/embedding.hpp"
#include "tbrl/textenc/tokenize.hpp"

namespace tbrl::lab {

enum class Exposure { rewarded, unrewarded, never };

inline std::string_view to_string(Exposure e) {
  switch (e) {
    case Exposure::rewarded: return "rewarded";
    case Exposure::unrewarded: return "unrewarded";
    case Exposure::never: return "never";
  }
  return "never";
}

// Token counts over the text that training saw (observation and chosen
// action of each stored transition), split by whether the step paid reward.
class TokenCorpus {
 public:
  void add(std::string_view text, bool rewarded) {
    for (const std::string& t : text::tokenize(text)) {
      auto& c = counts_[t];
      (rewarded ? c.first : c.second) += 1;
    }
  }

  void add(const std::string& token, long rewarded, long unrewarded) {
    auto& c = counts_[token];
    c.first += rewarded;
    c.second += unrewarded;
  }

  Exposure exposure(const std::string& token) const {
    auto it = counts_.find(token);
    if (it == counts_.end()) return Exposure::never;
    return it->second.first > 0 ? Exposure::rewarded : Exposure::unrewarded;
  }

  const std::map<std::string, std::pair<long, long>>& counts() const { return counts_; }

 private:
  std::map<std::string, std::pair<long, long>> counts_;
};

inline void write_corpus(std::ostream& out, const TokenCorpus& corpus) {
  out << "token\trewarded\tunrewarded\n";
  for (const auto& [token, c] : corpus.counts()) out << token << '\t' << c.first << '\t' << c.second << '\n';
}

inline TokenCorpus read_corpus(std::istream& in) {
  TokenCorpus corpus;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    long r = 0, u = 0;
    if (!(std::getline(ss, token, '\t') >> r >> u)) throw ParseError("bad corpus line", line_no);
    corpus.add(token, r, u);
  }
  return corpus;
}

inline TokenCorpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read_corpus(in);
}

struct DriftRow {
  std::string token;
  double distance = 0.0;
  bool degenerate = false;
  Exposure exposure = Exposure::never;
};

struct DriftReport {
  std::vector<DriftRow> rows;  // table order
  std::array<double, 3> mean{};  // indexed by Exposure
  std::array<int, 3> count{};
  std::vector<DriftRow> top;
};

// Per-row drift between two snapshots of one vocabulary. A row's exposure is
// the strongest exposure of any corpus token that looks it up, so the unk
// row inherits out-of-vocabulary text.
inline DriftReport drift_report(const text::EmbeddingTable& start, const text::EmbeddingTable& end,
                                const TokenCorpus& corpus, std::size_t top_k = 10) {
  if (start.tokens() != end.tokens() || start.dim() != end.dim()) {
    throw VocabMismatch("drift_report: start and end snapshots have different vocabularies");
  }
  std::vector<Exposure> exposure(start.size(), Exposure::never);
  for (const auto& [token, c] : corpus.counts()) {
    const auto row = static_cast<std::size_t>(start.index(token));
    const Exposure e = c.first > 0 ? Exposure::rewarded : Exposure::unrewarded;
    if (static_cast<int>(e) < static_cast<int>(exposure[row])) exposure[row] = e;
  }
  DriftReport report;
  std::array<std::vector<double>, 3> by_group;
  for (std::size_t i = 0; i < start.size(); ++i) {
    const auto r = static_cast<int>(i);
    const text::Drift d = text::cosine_drift(end.row(r), start.row(r));
    report.rows.push_back({start.tokens()[i], d.distance, d.degenerate, exposure[i]});
    by_group[static_cast<std::size_t>(exposure[i])].push_back(d.distance);
  }
  for (std::size_t g = 0; g < 3; ++g) {
    auto& v = by_group[g];
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    report.count[g] = static_cast<int>(v.size());
    report.mean[g] = v.empty() ? 0.0 : sum / static_cast<double>(v.size());
  }
  report.top = report.rows;
  std::sort(report.top.begin(), report.top.end(), [](const DriftRow& a, const DriftRow& b) {
    if (a.distance != b.distance) return a.distance > b.distance;
    return a.token < b.token;
  });
  if (report.top.size() > top_k) report.top.resize(top_k);
  return report;
}

inline void write_drift_csv(std::ostream& out, const DriftReport& report) {
  out << "token,drift,degenerate,exposure\n";
  for (const DriftRow& r : report.rows) {
    out << r.token << ',' << text::format_double(r.distance) << ',' << (r.degenerate ? 1 : 0) << ','
        << to_string(r.exposure) << '\n';
  }
}

}  // namespace tbrl::lab

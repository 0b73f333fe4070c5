#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "tbrl/errors.hpp"

namespace tbrl::lab {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) convention; 0 for a single value
  int n = 0;
};

// Values are summed in sorted order, so the result does not depend on the
// order they arrive in.
inline MeanStd mean_std(std::vector<double> values) {
  if (values.empty()) throw EmptyInput("mean of no values");
  std::sort(values.begin(), values.end());
  MeanStd out;
  out.n = static_cast<int>(values.size());
  if (values.front() == values.back()) {
    out.mean = values.front();
    return out;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / out.n;
  if (out.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (out.n - 1));
  }
  return out;
}

// One run's mean over the games of one (encoder, game set, mode) cell.
struct RunScore {
  std::string encoder;
  std::string game_set;
  std::string mode;
  std::uint64_t run_seed = 0;
  double score = 0.0;
  double moves = 0.0;
};

struct SummaryRow {
  std::string encoder;
  std::string game_set;
  std::string mode;
  MeanStd score;
  MeanStd moves;
  bool single_run = false;
};

inline std::vector<SummaryRow> aggregate(const std::vector<RunScore>& runs) {
  if (runs.empty()) throw EmptyInput("aggregate needs at least one run");
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const RunScore& r : runs) {
    auto& g = groups[{r.encoder, r.game_set, r.mode}];
    g.first.push_back(r.score);
    g.second.push_back(r.moves);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, values] : groups) {
    SummaryRow row;
    std::tie(row.encoder, row.game_set, row.mode) = key;
    row.score = mean_std(values.first);
    row.moves = mean_std(values.second);
    row.single_run = row.score.n == 1;
    out.push_back(std::move(row));
  }
  return out;
}

inline std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "encoder,game_set,perturb_mode,n_runs,score_mean,score_std,moves_mean,moves_std,single_run\n";
  for (const SummaryRow& r : rows) {
    out << r.encoder << ',' << r.game_set << ',' << r.mode << ',' << r.score.n << ','
        << fixed(r.score.mean, 6) << ',' << fixed(r.score.std, 6) << ',' << fixed(r.moves.mean, 6)
        << ',' << fixed(r.moves.std, 6) << ',' << (r.single_run ? 1 : 0) << '\n';
  }
}

// Table-style rows: "score mean ± std".
inline void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %-6s %-11s %-17s %-17s %s\n", "encoder", "set", "perturb",
                "score", "moves", "runs");
  out << buf;
  for (const SummaryRow& r : rows) {
    const std::string score = fixed(r.score.mean, 2) + " ± " + fixed(r.score.std, 2);
    const std::string moves = fixed(r.moves.mean, 1) + " ± " + fixed(r.moves.std, 1);
    std::snprintf(buf, sizeof buf, "%-20s %-6s %-11s %-17s %-17s %d%s\n", r.encoder.c_str(),
                  r.game_set.c_str(), r.mode.c_str(), score.c_str(), moves.c_str(), r.score.n,
                  r.single_run ? " (single run)" : "");
    out << buf;
  }
}

}  // namespace tbrl::lab

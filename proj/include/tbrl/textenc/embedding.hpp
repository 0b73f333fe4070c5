#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tbrl/engine/concepts.hpp"
#include "tbrl/engine/vocabulary.hpp"
#include "tbrl/errors.hpp"
#include "tbrl/numcore/tensor.hpp"
#include "tbrl/rng.hpp"
#include "tbrl/textenc/tokenize.hpp"

namespace tbrl::text {

inline constexpr std::string_view kUnkToken = "<unk>";

// Token rows plus the matrix as it was when the table was built or loaded.
// Rows not present in the source get the out-of-vocabulary row "<unk>",
// which is the mean of the other rows unless the source supplies one.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  EmbeddingTable(std::vector<std::string> tokens, const num::Matrix& rows)
      : tokens_(std::move(tokens)) {
    if (tokens_.size() != static_cast<std::size_t>(rows.rows())) {
      throw DimensionMismatch("embedding table: token count does not match row count");
    }
    num::Matrix m = rows;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
        throw ParseError("duplicate token '" + tokens_[i] + "'", static_cast<int>(i) + 1);
      }
    }
    auto unk = index_.find(std::string(kUnkToken));
    if (unk == index_.end()) {
      num::Vector mean = num::Vector::Zero(m.cols());
      if (m.rows() > 0) mean = m.colwise().mean().transpose();
      m.conservativeResize(m.rows() + 1, Eigen::NoChange);
      m.row(m.rows() - 1) = mean.transpose();
      tokens_.emplace_back(kUnkToken);
      unk_row_ = static_cast<int>(tokens_.size()) - 1;
      index_.emplace(tokens_.back(), unk_row_);
    } else {
      unk_row_ = unk->second;
    }
    num::require_finite(m, "embedding table");
    matrix_ = num::Param("embedding", m.rows(), m.cols());
    matrix_.value = m;
    snapshot_ = m;
  }

  int dim() const { return static_cast<int>(matrix_.cols()); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  int unk_row() const { return unk_row_; }

  bool contains(std::string_view token) const { return index_.count(std::string(token)) > 0; }

  // Row for a token, or the unk row.
  int index(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? unk_row_ : it->second;
  }

  num::Vector row(int i) const { return matrix_.value.row(i).transpose(); }
  num::Vector vector(std::string_view token) const { return row(index(token)); }
  num::Vector snapshot_vector(std::string_view token) const {
    return snapshot_.row(index(token)).transpose();
  }

  num::Param& matrix() { return matrix_; }
  const num::Param& matrix() const { return matrix_; }
  const num::Matrix& snapshot() const { return snapshot_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  int unk_row_ = -1;
  num::Param matrix_;
  num::Matrix snapshot_;
};

// ---------------------------------------------------------------------------
// GloVe text format
// ---------------------------------------------------------------------------

inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline EmbeddingTable parse_embeddings(std::istream& in) {
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (!rest.empty()) {
      const auto start = rest.find_first_not_of(' ');
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto end = rest.find(' ');
      fields.push_back(rest.substr(0, end));
      rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
    }
    if (fields.size() < 2) throw ParseError("expected a token followed by values", line_no);
    std::vector<double> values;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double x = 0.0;
      const auto* first = fields[i].data();
      const auto* last = first + fields[i].size();
      auto res = std::from_chars(first, last, x);
      if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError("malformed number '" + std::string(fields[i]) + "'", line_no);
      }
      values.push_back(x);
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw DimensionMismatch("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(rows.front().size()) + " values, found " +
                              std::to_string(values.size()));
    }
    tokens.emplace_back(fields[0]);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw EmptyInput("embedding file has no rows");
  num::Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return EmbeddingTable(std::move(tokens), m);
}

inline EmbeddingTable load_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return parse_embeddings(in);
}

// Shortest round-trip decimal form, so write-then-load is bit-exact.
inline void write_embeddings(std::ostream& out, const std::vector<std::string>& tokens,
                             const num::Matrix& m) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out << tokens[i];
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << ' ' << format_double(m(static_cast<Eigen::Index>(i), j));
    }
    out << '\n';
  }
}

inline void save_embedding_file(const EmbeddingTable& table, const std::filesystem::path& path,
                                bool snapshot = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_embeddings(out, table.tokens(), snapshot ? table.snapshot() : table.matrix().value);
}

// ---------------------------------------------------------------------------
// Synthetic pretraining
// ---------------------------------------------------------------------------

namespace detail {

inline num::Vector random_unit(Rng& rng, int d) {
  num::Vector v(d);
  double n = 0.0;
  do {
    for (int i = 0; i < d; ++i) v(i) = rng.normal();
    n = v.norm();
  } while (n == 0.0);
  return v / n;
}

}  // namespace detail

// Concept names cluster around a per-concept centroid (noise sd 0.05 per
// coordinate); template words and rooms get independent directions.
inline EmbeddingTable synth_pretrain(const engine::ConceptPool& pool, int d, std::uint64_t seed) {
  if (d < 2) throw DomainError("synth_pretrain needs d >= 2");
  Rng rng(seed);
  std::vector<std::string> tokens;
  std::vector<num::Vector> rows;
  for (const engine::Concept& c : pool.concepts()) {
    const num::Vector centroid = detail::random_unit(rng, d);
    auto add = [&](const std::string& name) {
      num::Vector v = centroid;
      for (int i = 0; i < d; ++i) v(i) += 0.05 * rng.normal();
      tokens.push_back(name);
      rows.push_back(v / v.norm());
    };
    for (const std::string& n : c.surface_names_id) add(n);
    for (const std::string& n : c.surface_names_ood) add(n);
  }
  for (const std::string& room : pool.rooms()) {
    tokens.push_back(room);
    rows.push_back(detail::random_unit(rng, d));
  }
  for (const std::string& w : engine::template_vocabulary()) {
    tokens.push_back(w);
    rows.push_back(detail::random_unit(rng, d));
  }
  num::Matrix m(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return EmbeddingTable(std::move(tokens), m);
}

// ---------------------------------------------------------------------------
// Lookup and drift
// ---------------------------------------------------------------------------

inline std::vector<int> token_rows(const TokenSequence& tokens, const EmbeddingTable& table) {
  std::vector<int> rows;
  rows.reserve(tokens.size());
  for (const std::string& t : tokens) rows.push_back(table.index(t));
  return rows;
}

inline num::Matrix embed_rows(const std::vector<int>& rows, const EmbeddingTable& table) {
  num::Matrix out(table.dim(), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out.col(static_cast<Eigen::Index>(t)) = table.matrix().value.row(rows[t]).transpose();
  }
  return out;
}

// d x T, column t is the row of token t.
inline num::Matrix embed_sequence(const TokenSequence& tokens, const EmbeddingTable& table) {
  return embed_rows(token_rows(tokens, table), table);
}

struct Drift {
  double distance = 0.0;
  bool degenerate = false;  // a zero-norm row; distance reported as 1

  bool operator==(const Drift&) const = default;
};

inline Drift cosine_drift(const num::Vector& current, const num::Vector& reference) {
  if (current.norm() == 0.0 || reference.norm() == 0.0) return {1.0, true};
  if (current == reference) return {0.0, false};
  return {1.0 - num::cosine(current, reference), false};
}

inline double cosine_distance(const num::Vector& a, const num::Vector& b) {
  return 1.0 - num::cosine(a, b);
}

// Per token, 1 - cos(current row, snapshot row).
inline std::map<std::string, Drift> embedding_drift(const EmbeddingTable& table) {
  std::map<std::string, Drift> out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[table.tokens()[i]] = cosine_drift(table.matrix().value.row(r).transpose(),
                                          table.snapshot().row(r).transpose());
  }
  return out;
}

}  // namespace tbrl::text

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tbrl/agent/agent.hpp"
#include "tbrl/errors.hpp"
#include "tbrl/textenc/embedding.hpp"

namespace tbrl::agent {

// Text dump of every named parameter (Q-network, then encoder), one matrix
// row per line in shortest round-trip decimal form.
inline void write_checkpoint(std::ostream& out, Agent& agent) {
  out << "tbrl-checkpoint 1\n";
  out << "encoder " << text::to_string(agent.encoder().kind()) << '\n';
  out << "adam_steps " << agent.optimizer().steps() << '\n';
  for (const num::Param* p : agent.all_parameters()) {
    out << "param " << p->name << ' ' << p->rows() << ' ' << p->cols() << '\n';
    for (Eigen::Index i = 0; i < p->rows(); ++i) {
      for (Eigen::Index j = 0; j < p->cols(); ++j) {
        if (j > 0) out << ' ';
        out << text::format_double(p->value(i, j));
      }
      out << '\n';
    }
  }
}

inline void save_checkpoint(Agent& agent, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_checkpoint(out, agent);
}

inline void read_checkpoint(std::istream& in, Agent& agent) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseError("checkpoint ends early", line_no + 1);
    ++line_no;
    return line;
  };
  if (next_line() != "tbrl-checkpoint 1") throw ParseError("not a checkpoint file", line_no);
  {
    std::istringstream ss(next_line());
    std::string key, kind;
    ss >> key >> kind;
    if (key != "encoder" || kind != text::to_string(agent.encoder().kind())) {
      throw ParseError("checkpoint encoder does not match the agent", line_no);
    }
  }
  {
    std::istringstream ss(next_line());
    std::string key;
    long steps = 0;
    if (!(ss >> key >> steps) || key != "adam_steps") throw ParseError("expected adam_steps", line_no);
    agent.optimizer().set_steps(steps);
  }
  num::ParamSet params = agent.all_parameters();
  std::size_t loaded = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string key, name;
    Eigen::Index rows = 0, cols = 0;
    if (!(ss >> key >> name >> rows >> cols) || key != "param") {
      throw ParseError("expected a param header", line_no);
    }
    if (!params.contains(name)) throw ParseError("unknown parameter " + name, line_no);
    num::Param& p = params.at(name);
    if (p.rows() != rows || p.cols() != cols) throw ParseError("shape mismatch for " + name, line_no);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const std::string& row = next_line();
      const char* cur = row.data();
      const char* end = row.data() + row.size();
      for (Eigen::Index j = 0; j < cols; ++j) {
        while (cur < end && *cur == ' ') ++cur;
        double x = 0.0;
        auto res = std::from_chars(cur, end, x);
        if (res.ec != std::errc()) throw ParseError("malformed value in " + name, line_no);
        p.value(i, j) = x;
        cur = res.ptr;
      }
    }
    ++loaded;
  }
  if (loaded != params.size()) throw ParseError("checkpoint is missing parameters", line_no);
  agent.clear_cache();
}

inline void load_checkpoint(Agent& agent, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  read_checkpoint(in, agent);
}

}  // namespace tbrl::agent

#pragma once

#include <string_view>

#include "tbrl/errors.hpp"
#include "tbrl/numcore/layers.hpp"
#include "tbrl/rng.hpp"
#include "tbrl/textenc/encoder.hpp"

namespace tbrl::agent {

// g(f(o), f(a)): a GRU reads f(o) then f(a) from a zero state, and a linear
// head maps its final state to Q.
struct QNetworkParams {
  num::GruParams sa_gru;
  num::LinearParams head;

  QNetworkParams() = default;
  explicit QNetworkParams(int hidden)
      : sa_gru(hidden, hidden, "q.gru"), head(hidden, 1, "q.head") {}

  int hidden_size() const { return sa_gru.hidden_size(); }

  void init_glorot(Rng& rng) {
    sa_gru.init_glorot(rng);
    head.init_glorot(rng);
  }

  num::ParamSet parameters() {
    num::ParamSet set;
    sa_gru.visit([&](num::Param& p) { set.add(p); });
    head.visit([&](num::Param& p) { set.add(p); });
    return set;
  }
};

// First GRU step, shared by every action of one observation.
inline num::Vector state_hidden(const num::Vector& f_obs, const QNetworkParams& q,
                                num::GruCellCache* cache = nullptr) {
  if (f_obs.size() != q.hidden_size()) throw DimensionMismatch("q_value: observation encoding size");
  return num::gru_cell_forward(q.sa_gru, f_obs, num::Vector::Zero(q.hidden_size()), cache);
}

inline double q_from_hidden(const num::Vector& h_obs, const num::Vector& f_action,
                            const QNetworkParams& q, num::GruCellCache* cache = nullptr) {
  if (f_action.size() != q.hidden_size()) throw DimensionMismatch("q_value: action encoding size");
  const num::Vector h = num::gru_cell_forward(q.sa_gru, f_action, h_obs, cache);
  return q.head.W.value.row(0).dot(h) + q.head.b.value(0, 0);
}

inline double q_value(const num::Vector& f_obs, const num::Vector& f_action, const QNetworkParams& q) {
  return q_from_hidden(state_hidden(f_obs, q), f_action, q);
}

inline double q_value(std::string_view obs_text, std::string_view action_text,
                      const text::TextEncoder& encoder, const QNetworkParams& q) {
  return q_value(encoder.encode(obs_text), encoder.encode(action_text), q);
}

enum class Policy { sample, greedy };

// Sample: draw from softmax(q). Greedy: argmax, lowest index on ties.
inline std::size_t select_action(const num::Vector& q, Policy mode, Rng& rng) {
  if (q.size() == 0) throw EmptyInput("select_action on an empty Q vector");
  if (mode == Policy::greedy) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < q.size(); ++i) {
      if (q(i) > q(best)) best = i;
    }
    return static_cast<std::size_t>(best);
  }
  const num::Vector p = num::softmax(q);
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    if (u < acc) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(p.size() - 1);
}

inline double td_target(double reward, double gamma, double max_next_q, bool done) {
  return done ? reward : reward + gamma * max_next_q;
}

}  // namespace tbrl::agent

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tbrl/engine/game.hpp"
#include "tbrl/engine/rules.hpp"

namespace tbrl::engine {

struct OracleOptions {
  // Skip actions that can never shorten a plan: look, touching non-target or
  // already-paid objects, puts onto non-destination holders, opening
  // containers that neither hold nor receive an outstanding target.
  bool prune_dominated = true;
  std::size_t max_states = 2'000'000;
};

namespace detail {

// BFS identity of a state. Steps and score are not part of it: steps is the
// search depth and score is a function of goal_satisfied.
using StateKey = std::tuple<int, std::vector<Location>, std::vector<bool>, std::vector<bool>>;

inline StateKey key_of(const GameState& s) {
  return {s.current_room, s.placements, s.open_flags, s.goal_satisfied};
}

inline bool goals_reached(const GameState& s, const GameSpec& spec) {
  for (std::size_t g = 0; g < spec.goals.size(); ++g) {
    const Goal& goal = spec.goals[g];
    if (!s.goal_satisfied[g] &&
        !(s.placements[static_cast<std::size_t>(goal.object)] == Location::on(goal.destination))) {
      return false;
    }
  }
  return true;
}

inline bool useful(const Action& a, const GameState& s, const GameSpec& spec) {
  auto outstanding_goal = [&](int object) -> const Goal* {
    for (std::size_t g = 0; g < spec.goals.size(); ++g) {
      if (spec.goals[g].object == object && !s.goal_satisfied[g]) return &spec.goals[g];
    }
    return nullptr;
  };
  switch (a.verb) {
    case Verb::look: return false;
    case Verb::go: return true;
    case Verb::take: return outstanding_goal(a.object) != nullptr;
    case Verb::put: {
      const Goal* g = outstanding_goal(a.object);
      return g != nullptr && g->destination == a.furniture;
    }
    case Verb::open:
      for (std::size_t g = 0; g < spec.goals.size(); ++g) {
        if (s.goal_satisfied[g]) continue;
        const Goal& goal = spec.goals[g];
        if (goal.destination == a.furniture ||
            s.placements[static_cast<std::size_t>(goal.object)] == Location::on(a.furniture)) {
          return true;
        }
      }
      return false;
  }
  return true;
}

}  // namespace detail

// Breadth-first search over the exact state graph. Actions are expanded in
// admissible-list order, so the returned plan is the first shortest one in
// that order. Returns nullopt when no plan fits in spec.max_steps.
inline std::optional<std::vector<std::string>> oracle_solve(const GameSpec& spec,
                                                            const OracleOptions& opts = {}) {
  GameState start = initial_state(spec);
  if (detail::goals_reached(start, spec)) return std::vector<std::string>{};

  struct Node {
    GameState state;
    int parent;
    std::string action;
  };
  std::vector<Node> nodes;
  std::map<detail::StateKey, int> seen;
  nodes.push_back({start, -1, ""});
  seen.emplace(detail::key_of(start), 0);

  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (nodes[head].state.steps >= spec.max_steps) continue;
    const GameState current = nodes[head].state;
    for (const auto& [text, action] : labelled_actions(current, spec)) {
      if (opts.prune_dominated && !detail::useful(action, current, spec)) continue;
      GameState next = current;
      apply_action(next, spec, action);
      if (!seen.emplace(detail::key_of(next), static_cast<int>(nodes.size())).second) continue;
      nodes.push_back({next, static_cast<int>(head), text});
      if (detail::goals_reached(next, spec)) {
        std::vector<std::string> plan;
        for (int i = static_cast<int>(nodes.size()) - 1; nodes[static_cast<std::size_t>(i)].parent >= 0;
             i = nodes[static_cast<std::size_t>(i)].parent) {
          plan.push_back(nodes[static_cast<std::size_t>(i)].action);
        }
        return std::vector<std::string>(plan.rbegin(), plan.rend());
      }
      if (nodes.size() >= opts.max_states) return std::nullopt;
    }
  }
  return std::nullopt;
}

// Full reachable state graph with edges listed in legal_actions order. Two
// games whose graphs compare equal are isomorphic under the identity map on
// (state index, action index).
struct StateGraph {
  struct Edge {
    Action action;
    int reward = 0;
    int target = 0;
    bool operator==(const Edge&) const = default;
  };
  std::vector<GameState> states;
  std::vector<std::vector<Edge>> edges;
  bool truncated = false;

  bool operator==(const StateGraph&) const = default;
};

inline StateGraph explore_state_graph(const GameSpec& spec, std::size_t max_states = 200'000) {
  StateGraph graph;
  std::map<detail::StateKey, int> seen;
  GameState start = initial_state(spec);
  graph.states.push_back(start);
  seen.emplace(detail::key_of(start), 0);
  for (std::size_t head = 0; head < graph.states.size(); ++head) {
    graph.edges.emplace_back();
    const GameState current = graph.states[head];
    if (current.done) continue;
    for (const Action& a : legal_actions(current, spec)) {
      GameState next = current;
      const int reward = apply_action(next, spec, a);
      next.steps = 0;  // graph identity ignores time
      next.done = next.score == spec.max_score();
      auto [it, fresh] = seen.emplace(detail::key_of(next), static_cast<int>(graph.states.size()));
      if (fresh) {
        if (graph.states.size() >= max_states) {
          graph.truncated = true;
          seen.erase(it);
          continue;
        }
        graph.states.push_back(next);
      }
      graph.edges[head].push_back({a, reward, it->second});
    }
  }
  return graph;
}

}  // namespace tbrl::engine

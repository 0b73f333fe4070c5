#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tbrl/engine/game.hpp"
#include "tbrl/engine/render.hpp"

namespace tbrl::engine {

// Legal instantiations of the action grammar in structured (verb, object,
// furniture, room) order. An object whose goal has been paid is settled and
// can no longer be taken.
inline std::vector<Action> legal_actions(const GameState& state, const GameSpec& spec) {
  std::vector<Action> out;
  out.push_back({Verb::look});
  for (int r = 0; r < static_cast<int>(spec.rooms.size()); ++r) {
    if (r == state.current_room - 1 || r == state.current_room + 1) {
      out.push_back({Verb::go, -1, -1, r});
    }
  }
  const int n_furniture = static_cast<int>(spec.furniture.size());
  for (int f = 0; f < n_furniture; ++f) {
    const Furniture& fu = spec.furniture[static_cast<std::size_t>(f)];
    if (fu.room == state.current_room && fu.kind == HolderKind::container &&
        !state.open_flags[static_cast<std::size_t>(f)]) {
      out.push_back({Verb::open, -1, f, -1});
    }
  }
  auto settled = [&](int o) {
    for (std::size_t g = 0; g < spec.goals.size(); ++g) {
      if (spec.goals[g].object == o && state.goal_satisfied[g]) return true;
    }
    return false;
  };
  for (int o = 0; o < static_cast<int>(spec.objects.size()); ++o) {
    if (settled(o)) continue;
    const Location& loc = state.placements[static_cast<std::size_t>(o)];
    if (loc.place == Place::floor && loc.index == state.current_room) {
      out.push_back({Verb::take, o, -1, -1});
    } else if (loc.place == Place::furniture) {
      const auto f = static_cast<std::size_t>(loc.index);
      if (spec.furniture[f].room == state.current_room && state.open_flags[f]) {
        out.push_back({Verb::take, o, loc.index, -1});
      }
    }
  }
  for (int o = 0; o < static_cast<int>(spec.objects.size()); ++o) {
    if (state.placements[static_cast<std::size_t>(o)].place != Place::inventory) continue;
    for (int f = 0; f < n_furniture; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      if (spec.furniture[fi].room == state.current_room && state.open_flags[fi]) {
        out.push_back({Verb::put, o, f, -1});
      }
    }
  }
  return out;
}

// Canonical strings, sorted lexicographically, paired with their actions.
inline std::vector<std::pair<std::string, Action>> labelled_actions(const GameState& state,
                                                                     const GameSpec& spec,
                                                                     int template_set_id = 0) {
  std::vector<std::pair<std::string, Action>> out;
  for (const Action& a : legal_actions(state, spec)) {
    out.emplace_back(describe_action(a, state, spec, template_set_id), a);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

inline std::vector<std::string> admissible_actions(const GameState& state, const GameSpec& spec) {
  std::vector<std::string> out;
  for (auto& [text, action] : labelled_actions(state, spec)) out.push_back(std::move(text));
  return out;
}

inline Observation observe(const GameState& state, const GameSpec& spec) {
  return {render_observation(state, spec, spec.template_set_id), admissible_actions(state, spec)};
}

inline GameState initial_state(const GameSpec& spec) {
  GameState s;
  s.current_room = 0;
  for (const GameObject& o : spec.objects) s.placements.push_back(o.start);
  for (const Furniture& f : spec.furniture) s.open_flags.push_back(f.open);
  s.goal_satisfied.assign(spec.goals.size(), false);
  return s;
}

inline std::pair<GameState, Observation> reset(const GameSpec& spec) {
  GameState s = initial_state(spec);
  Observation obs = observe(s, spec);
  return {std::move(s), std::move(obs)};
}

// Applies a legal action; returns the reward (newly satisfied goals).
inline int apply_action(GameState& state, const GameSpec& spec, const Action& a) {
  switch (a.verb) {
    case Verb::look: break;
    case Verb::go: state.current_room = a.room; break;
    case Verb::open: state.open_flags[static_cast<std::size_t>(a.furniture)] = true; break;
    case Verb::take: state.placements[static_cast<std::size_t>(a.object)] = Location::inventory(); break;
    case Verb::put:
      state.placements[static_cast<std::size_t>(a.object)] = Location::on(a.furniture);
      break;
  }
  int reward = 0;
  for (std::size_t g = 0; g < spec.goals.size(); ++g) {
    if (state.goal_satisfied[g]) continue;
    const Goal& goal = spec.goals[g];
    if (state.placements[static_cast<std::size_t>(goal.object)] == Location::on(goal.destination)) {
      state.goal_satisfied[g] = true;
      ++reward;
    }
  }
  state.score += reward;
  ++state.steps;
  state.done = state.score == spec.max_score() || state.steps >= spec.max_steps;
  return reward;
}

struct StepResult {
  GameState state;
  Observation observation;
  int reward = 0;
  bool done = false;
};

inline StepResult step(const GameState& state, const GameSpec& spec, std::string_view action) {
  if (state.done) throw EpisodeFinished("the episode has already finished");
  for (const auto& [text, a] : labelled_actions(state, spec)) {
    if (text != action) continue;
    StepResult r{state, {}, 0, false};
    r.reward = apply_action(r.state, spec, a);
    r.done = r.state.done;
    r.observation = observe(r.state, spec);
    return r;
  }
  throw InadmissibleAction("'" + std::string(action) + "' is not admissible");
}

}  // namespace tbrl::engine

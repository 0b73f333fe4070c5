#pragma once

#include <string_view>
#include <utility>

#include "tbrl/engine/game.hpp"
#include "tbrl/engine/rules.hpp"

namespace tbrl::engine {

struct StepOutcome {
  Observation observation;
  int reward = 0;
  bool done = false;
};

// Stateful environment interface shared by the raw engine and the
// perturbation wrappers.
class Env {
 public:
  virtual ~Env() = default;
  virtual Observation reset() = 0;
  virtual StepOutcome step(std::string_view action) = 0;
  virtual const GameState& state() const = 0;
  virtual const GameSpec& spec() const = 0;

  int max_score() const { return spec().max_score(); }
  // True terminal (every goal paid) as opposed to running out of steps.
  bool goals_complete() const { return state().score == spec().max_score(); }
};

class GameEnv : public Env {
 public:
  explicit GameEnv(GameSpec spec) : spec_(std::move(spec)), state_(initial_state(spec_)) {}

  Observation reset() override {
    auto [s, obs] = engine::reset(spec_);
    state_ = std::move(s);
    return obs;
  }

  StepOutcome step(std::string_view action) override {
    StepResult r = engine::step(state_, spec_, action);
    state_ = std::move(r.state);
    return {std::move(r.observation), r.reward, r.done};
  }

  const GameState& state() const override { return state_; }
  const GameSpec& spec() const override { return spec_; }

  // Jump to an arbitrary state of this game (used by graph exploration).
  Observation restore(GameState s) {
    state_ = std::move(s);
    return observe(state_, spec_);
  }

 private:
  GameSpec spec_;
  GameState state_;
};

}  // namespace tbrl::engine

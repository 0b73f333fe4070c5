#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tbrl/engine/env.hpp"
#include "tbrl/engine/game.hpp"
#include "tbrl/engine/render.hpp"
#include "tbrl/engine/rules.hpp"
#include "tbrl/perturb/lexicon.hpp"

namespace tbrl::perturb {

enum class PerturbMode { none, paraphrase, lexical };

inline std::string_view to_string(PerturbMode m) {
  switch (m) {
    case PerturbMode::none: return "none";
    case PerturbMode::paraphrase: return "paraphrase";
    case PerturbMode::lexical: return "lexical";
  }
  return "none";
}

inline PerturbMode parse_perturb_mode(std::string_view s) {
  if (s == "none") return PerturbMode::none;
  if (s == "paraphrase") return PerturbMode::paraphrase;
  if (s == "lexical") return PerturbMode::lexical;
  throw ConfigError("unknown perturbation mode '" + std::string(s) + "'");
}

inline int alternate_template_set(const engine::GameSpec& spec) {
  engine::require_template_set(spec.template_set_id);
  if (engine::template_set_count() < 2) {
    throw MissingAlternate("no alternate template set for set " + std::to_string(spec.template_set_id));
  }
  return (spec.template_set_id + 1) % engine::template_set_count();
}

// The observation in the next template family after the game's own.
inline std::string paraphrase_render(const engine::GameState& state, const engine::GameSpec& spec) {
  return engine::render_observation(state, spec, alternate_template_set(spec));
}

// Environment whose observation text and action strings pass through one
// perturbation. Displayed actions map back to the same engine actions.
class PerturbedEnv : public engine::Env {
 public:
  PerturbedEnv(engine::GameSpec spec, PerturbMode mode, Lexicon lexicon = {}, std::uint64_t seed = 0,
               double rate = 1.0)
      : inner_(std::move(spec)), mode_(mode), lexicon_(std::move(lexicon)), seed_(seed), rate_(rate) {
    if (mode_ == PerturbMode::paraphrase) alternate_template_set(inner_.spec());
    if (mode_ == PerturbMode::lexical && !(rate_ > 0.0 && rate_ <= 1.0)) {
      throw DomainError("substitution rate must be in (0, 1]");
    }
  }

  PerturbMode mode() const { return mode_; }

  engine::Observation reset() override {
    inner_.reset();
    return observe();
  }

  engine::StepOutcome step(std::string_view action) override {
    auto it = to_engine_.find(std::string(action));
    if (it == to_engine_.end()) {
      throw InadmissibleAction("'" + std::string(action) + "' is not admissible");
    }
    engine::StepOutcome out = inner_.step(it->second);
    return {observe(), out.reward, out.done};
  }

  const engine::GameState& state() const override { return inner_.state(); }
  const engine::GameSpec& spec() const override { return inner_.spec(); }

  engine::Observation restore(engine::GameState s) {
    inner_.restore(std::move(s));
    return observe();
  }

  // Engine action string behind a displayed one.
  const std::string& engine_action(const std::string& displayed) const {
    auto it = to_engine_.find(displayed);
    if (it == to_engine_.end()) throw InadmissibleAction("'" + displayed + "' is not admissible");
    return it->second;
  }

  // Perturbed view of the current state; also refreshes the action map.
  engine::Observation observe() {
    const engine::GameState& s = inner_.state();
    const engine::GameSpec& g = inner_.spec();
    engine::Observation obs;
    to_engine_.clear();
    switch (mode_) {
      case PerturbMode::none:
        obs.text = engine::render_observation(s, g, g.template_set_id);
        break;
      case PerturbMode::paraphrase: obs.text = paraphrase_render(s, g); break;
      case PerturbMode::lexical:
        obs.text = lexical_substitute(engine::render_observation(s, g, g.template_set_id), lexicon_,
                                      rate_, seed_);
        break;
    }
    const int alt = mode_ == PerturbMode::paraphrase ? alternate_template_set(g) : 0;
    for (const auto& [canonical, action] : engine::labelled_actions(s, g)) {
      std::string shown = canonical;
      if (mode_ == PerturbMode::paraphrase) shown = engine::describe_action(action, s, g, alt);
      if (mode_ == PerturbMode::lexical) shown = lexical_substitute(canonical, lexicon_, rate_, seed_);
      if (!to_engine_.emplace(shown, canonical).second) {
        throw Error("perturbation maps two actions to '" + shown + "'");
      }
      obs.admissible_actions.push_back(std::move(shown));
    }
    std::sort(obs.admissible_actions.begin(), obs.admissible_actions.end());
    return obs;
  }

 private:
  engine::GameEnv inner_;
  PerturbMode mode_;
  Lexicon lexicon_;
  std::uint64_t seed_;
  double rate_;
  std::map<std::string, std::string> to_engine_;
};

inline PerturbedEnv wrap_env(engine::GameSpec spec, PerturbMode mode, const Lexicon& lexicon,
                             std::uint64_t seed, double rate = 1.0) {
  return PerturbedEnv(std::move(spec), mode, lexicon, seed, rate);
}

// The same task with held-out object names.
inline engine::GameEnv ood_vocab_env(std::uint64_t spec_seed, engine::Difficulty difficulty,
                                     const engine::ConceptPool& pool) {
  return engine::GameEnv(engine::generate_game(difficulty, spec_seed, pool, engine::VocabMode::ood));
}

}  // namespace tbrl::perturb

#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "tbrl/engine/game.hpp"
#include "tbrl/perturb/wrap.hpp"

namespace tbrl::lab {

struct PlayResult {
  int score = 0;
  int max_score = 0;
  double normalized = 0.0;
  int moves = 0;
  bool quit = false;
};

// Text session: prints the observation and numbered actions, reads a 1-based
// index (or q) per turn. Bad input re-prompts without touching the game.
inline PlayResult play(const engine::GameSpec& spec, perturb::PerturbMode mode, std::istream& in,
                       std::ostream& out, const perturb::Lexicon& lexicon = {}, std::uint64_t seed = 0) {
  perturb::PerturbedEnv env(spec, mode, lexicon, seed);
  engine::Observation obs = env.reset();
  PlayResult result;
  result.max_score = env.max_score();
  bool show = true;
  while (!env.state().done) {
    if (show) {
      out << '\n' << obs.text << '\n';
      for (std::size_t i = 0; i < obs.admissible_actions.size(); ++i) {
        out << "  " << (i + 1) << ". " << obs.admissible_actions[i] << '\n';
      }
    }
    out << "> " << std::flush;
    std::string line;
    if (!std::getline(in, line) || line == "q" || line == "quit") {
      result.quit = true;
      break;
    }
    std::size_t choice = 0;
    auto res = std::from_chars(line.data(), line.data() + line.size(), choice);
    if (res.ec != std::errc() || res.ptr != line.data() + line.size() || choice < 1 ||
        choice > obs.admissible_actions.size()) {
      out << "Enter a number from 1 to " << obs.admissible_actions.size() << ", or q to quit.\n";
      show = false;
      continue;
    }
    const engine::StepOutcome step = env.step(obs.admissible_actions[choice - 1]);
    obs = step.observation;
    show = true;
    if (step.reward > 0) out << "Reward +" << step.reward << ".\n";
    out << "Score: " << env.state().score << "/" << result.max_score << '\n';
  }
  result.score = env.state().score;
  result.moves = env.state().steps;
  result.normalized = engine::normalized_score(result.score, result.max_score);
  out << "Final score: " << result.score << "/" << result.max_score << " ("
      << result.normalized << ") in " << result.moves << " moves.\n";
  return result;
}

}  // namespace tbrl::lab

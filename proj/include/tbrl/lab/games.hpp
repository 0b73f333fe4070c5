#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "tbrl/engine/concepts.hpp"
#include "tbrl/engine/game.hpp"
#include "tbrl/lab/config.hpp"

namespace tbrl::lab {

#ifdef TBRL_DEFAULT_DATA_DIR
inline std::filesystem::path default_data_dir() { return TBRL_DEFAULT_DATA_DIR; }
#else
inline std::filesystem::path default_data_dir() { return "data"; }
#endif

inline engine::ConceptPool load_pool(const ExperimentConfig& c) {
  return engine::load_concept_pool(c.concept_pool.empty() ? default_data_dir() / "concepts.json"
                                                          : std::filesystem::path(c.concept_pool));
}

// Training games use seeds suite_seed + i. Evaluation games use seeds
// suite_seed + 1000 + j, drawn only from the rooms, furniture and objects
// that occur in training, so the ID set tests new layouts of familiar things;
// the OOD set is the same games with held-out object names.
struct GameSuite {
  std::vector<engine::GameSpec> train;
  std::vector<engine::GameSpec> eval_id;
  std::vector<engine::GameSpec> eval_ood;
};

inline GameSuite build_suite(const ExperimentConfig& c, const engine::ConceptPool& pool) {
  GameSuite suite;
  std::set<std::string> seen;
  std::set<std::string> seen_rooms;
  for (int i = 0; i < c.n_train_games; ++i) {
    engine::GameSpec g = engine::generate_game(c.difficulty, c.suite_seed + static_cast<std::uint64_t>(i),
                                               pool, engine::VocabMode::id);
    g.max_steps = c.max_steps;
    for (const auto& o : g.objects) seen.insert(o.concept_id);
    for (const auto& f : g.furniture) seen.insert(f.concept_id);
    seen_rooms.insert(g.rooms.begin(), g.rooms.end());
    suite.train.push_back(std::move(g));
  }
  const engine::ConceptPool familiar = pool.restricted_to(seen, seen_rooms);
  for (int j = 0; j < std::max(c.n_eval_games_id, c.n_eval_games_ood); ++j) {
    const std::uint64_t seed = c.suite_seed + 1000 + static_cast<std::uint64_t>(j);
    if (j < c.n_eval_games_id) {
      suite.eval_id.push_back(engine::generate_game(c.difficulty, seed, familiar, engine::VocabMode::id));
      suite.eval_id.back().max_steps = c.max_steps;
    }
    if (j < c.n_eval_games_ood) {
      suite.eval_ood.push_back(engine::generate_game(c.difficulty, seed, familiar, engine::VocabMode::ood));
      suite.eval_ood.back().max_steps = c.max_steps;
    }
  }
  return suite;
}

inline std::string numbered(const std::string& stem, int i, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%03d", i);
  return stem + buf + ext;
}

// Writes game_000.json ... with seeds seed, seed + 1, ...
inline std::vector<std::filesystem::path> gen_games(engine::Difficulty difficulty, int count,
                                                    std::uint64_t seed, engine::VocabMode mode,
                                                    const engine::ConceptPool& pool,
                                                    const std::filesystem::path& out_dir) {
  if (count < 1) throw ConfigError("count must be positive");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> paths;
  for (int i = 0; i < count; ++i) {
    const auto spec = engine::generate_game(difficulty, seed + static_cast<std::uint64_t>(i), pool, mode);
    paths.push_back(out_dir / numbered("game", i, ".json"));
    engine::save_game_spec(spec, paths.back());
  }
  return paths;
}

}  // namespace tbrl::lab

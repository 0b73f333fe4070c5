#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tbrl/agent/config.hpp"
#include "tbrl/engine/game.hpp"
#include "tbrl/errors.hpp"
#include "tbrl/perturb/wrap.hpp"
#include "tbrl/textenc/encoder.hpp"

namespace tbrl::lab {

// Everything that determines an experiment's output files. Relative paths
// are resolved against the directory of the config file they came from.
struct ExperimentConfig {
  engine::Difficulty difficulty = engine::Difficulty::medium;
  int n_train_games = 5;
  int n_eval_games_id = 5;
  int n_eval_games_ood = 5;
  int episodes = 100;
  int max_steps = 50;
  int n_runs = 5;
  text::EncoderKind encoder = text::EncoderKind::hash;
  agent::AgentConfig agent;
  std::vector<perturb::PerturbMode> perturb_modes = {perturb::PerturbMode::none,
                                                     perturb::PerturbMode::paraphrase,
                                                     perturb::PerturbMode::lexical};
  std::vector<std::uint64_t> seeds;  // one per run; empty means 1..n_runs
  std::string out_dir = "results";
  std::uint64_t suite_seed = 100;
  int embedding_dim = 50;
  int hidden_dim = 64;
  std::uint64_t pretrain_seed = 7;
  std::uint64_t hash_salt = 0;
  double encoder_gate_bias = -3.0;
  std::string concept_pool;  // empty means the bundled pool
  std::string embeddings;    // GloVe-format file; empty means synthetic pretraining
  std::string lexicon;       // empty means the pool's ID -> OOD names
  double lexical_rate = 1.0;
  std::uint64_t perturb_seed = 0;
  int workers = 1;

  std::vector<std::uint64_t> run_seeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out;
    for (int i = 1; i <= n_runs; ++i) out.push_back(static_cast<std::uint64_t>(i));
    return out;
  }

  void validate() const {
    if (n_train_games < 1 || n_eval_games_id < 1 || n_eval_games_ood < 1) {
      throw ConfigError("game counts must be positive");
    }
    if (episodes < 1) throw ConfigError("episodes must be positive");
    if (max_steps < 1) throw ConfigError("max_steps must be positive");
    if (n_runs < 1) throw ConfigError("n_runs must be positive");
    if (!seeds.empty() && static_cast<int>(seeds.size()) != n_runs) {
      throw ConfigError("seeds must list exactly n_runs entries");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
      throw ConfigError("run seeds must be distinct");
    }
    if (embedding_dim < 2 || hidden_dim < 1) throw ConfigError("dimensions must be positive");
    if (!(lexical_rate > 0.0 && lexical_rate <= 1.0)) throw ConfigError("lexical_rate must be in (0, 1]");
    if (workers < 1) throw ConfigError("workers must be positive");
    if (out_dir.empty()) throw ConfigError("out_dir must be set");
    agent.validate();
  }
};

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["difficulty"] = std::string(engine::to_string(c.difficulty));
  j["n_train_games"] = c.n_train_games;
  j["n_eval_games_id"] = c.n_eval_games_id;
  j["n_eval_games_ood"] = c.n_eval_games_ood;
  j["episodes"] = c.episodes;
  j["max_steps"] = c.max_steps;
  j["n_runs"] = c.n_runs;
  j["encoder"] = std::string(text::to_string(c.encoder));
  j["agent"] = agent::to_json(c.agent);
  j["perturb_modes"] = nlohmann::ordered_json::array();
  for (auto m : c.perturb_modes) j["perturb_modes"].push_back(std::string(perturb::to_string(m)));
  j["seeds"] = c.seeds;
  j["out_dir"] = c.out_dir;
  j["suite_seed"] = c.suite_seed;
  j["embedding_dim"] = c.embedding_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["pretrain_seed"] = c.pretrain_seed;
  j["hash_salt"] = c.hash_salt;
  j["encoder_gate_bias"] = c.encoder_gate_bias;
  j["concept_pool"] = c.concept_pool;
  j["embeddings"] = c.embeddings;
  j["lexicon"] = c.lexicon;
  j["lexical_rate"] = c.lexical_rate;
  j["perturb_seed"] = c.perturb_seed;
  j["workers"] = c.workers;
  return j;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                                    const std::filesystem::path& base_dir = {}) {
  static const std::set<std::string> known = {
      "difficulty", "n_train_games", "n_eval_games_id", "n_eval_games_ood", "episodes",
      "max_steps", "n_runs", "encoder", "agent", "perturb_modes", "seeds", "out_dir",
      "suite_seed", "embedding_dim", "hidden_dim", "pretrain_seed", "hash_salt", "encoder_gate_bias", "concept_pool",
      "embeddings", "lexicon", "lexical_rate", "perturb_seed", "workers"};
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) == 0) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  auto resolve = [&](const std::string& p) {
    if (p.empty() || base_dir.empty() || std::filesystem::path(p).is_absolute()) return p;
    return (base_dir / p).lexically_normal().string();
  };
  try {
    if (j.contains("difficulty")) c.difficulty = engine::parse_difficulty(j["difficulty"].get<std::string>());
    c.n_train_games = j.value("n_train_games", c.n_train_games);
    c.n_eval_games_id = j.value("n_eval_games_id", c.n_eval_games_id);
    c.n_eval_games_ood = j.value("n_eval_games_ood", c.n_eval_games_ood);
    c.episodes = j.value("episodes", c.episodes);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.n_runs = j.value("n_runs", c.n_runs);
    if (j.contains("encoder")) c.encoder = text::parse_encoder_kind(j["encoder"].get<std::string>());
    if (j.contains("agent")) c.agent = agent::agent_config_from_json(j["agent"]);
    if (j.contains("perturb_modes")) {
      c.perturb_modes.clear();
      for (const auto& m : j["perturb_modes"]) {
        c.perturb_modes.push_back(perturb::parse_perturb_mode(m.get<std::string>()));
      }
    }
    c.seeds = j.value("seeds", c.seeds);
    c.out_dir = resolve(j.value("out_dir", c.out_dir));
    c.suite_seed = j.value("suite_seed", c.suite_seed);
    c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.pretrain_seed = j.value("pretrain_seed", c.pretrain_seed);
    c.hash_salt = j.value("hash_salt", c.hash_salt);
    c.encoder_gate_bias = j.value("encoder_gate_bias", c.encoder_gate_bias);
    c.concept_pool = resolve(j.value("concept_pool", c.concept_pool));
    c.embeddings = resolve(j.value("embeddings", c.embeddings));
    c.lexicon = resolve(j.value("lexicon", c.lexicon));
    c.lexical_rate = j.value("lexical_rate", c.lexical_rate);
    c.perturb_seed = j.value("perturb_seed", c.perturb_seed);
    c.workers = j.value("workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  // The encoder kind decides whether gradients reach the encoder.
  c.agent.fine_tune_encoder = c.encoder == text::EncoderKind::embedding_finetuned;
  c.validate();
  return c;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j, path.parent_path());
}

}  // namespace tbrl::lab

#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "tbrl/errors.hpp"

namespace tbrl::agent {

struct AgentConfig {
  double gamma = 0.9;
  double lr = 1e-3;
  int batch_size = 32;
  int replay_capacity = 10000;
  int warmup_transitions = 100;
  int train_every = 1;
  bool fine_tune_encoder = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in (0, 1]");
    if (!(lr > 0.0)) throw ConfigError("lr must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
    if (replay_capacity < 1) throw ConfigError("replay_capacity must be positive");
    if (warmup_transitions < 1) throw ConfigError("warmup_transitions must be positive");
    if (train_every < 1) throw ConfigError("train_every must be positive");
  }
};

inline nlohmann::ordered_json to_json(const AgentConfig& c) {
  nlohmann::ordered_json j;
  j["gamma"] = c.gamma;
  j["lr"] = c.lr;
  j["batch_size"] = c.batch_size;
  j["replay_capacity"] = c.replay_capacity;
  j["warmup_transitions"] = c.warmup_transitions;
  j["train_every"] = c.train_every;
  j["fine_tune_encoder"] = c.fine_tune_encoder;
  j["seed"] = c.seed;
  return j;
}

// Missing keys keep their defaults.
inline AgentConfig agent_config_from_json(const nlohmann::json& j) {
  AgentConfig c;
  try {
    c.gamma = j.value("gamma", c.gamma);
    c.lr = j.value("lr", c.lr);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.replay_capacity = j.value("replay_capacity", c.replay_capacity);
    c.warmup_transitions = j.value("warmup_transitions", c.warmup_transitions);
    c.train_every = j.value("train_every", c.train_every);
    c.fine_tune_encoder = j.value("fine_tune_encoder", c.fine_tune_encoder);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("agent config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace tbrl::agent

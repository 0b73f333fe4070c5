#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tbrl/agent/config.hpp"
#include "tbrl/agent/qnet.hpp"
#include "tbrl/agent/replay.hpp"
#include "tbrl/engine/env.hpp"
#include "tbrl/numcore/adam.hpp"
#include "tbrl/numcore/layers.hpp"
#include "tbrl/rng.hpp"
#include "tbrl/textenc/encoder.hpp"

namespace tbrl::agent {

// One training run's learner: encoder, Q-network, replay memory, optimizer
// and exploration stream, all owned here.
class Agent {
 public:
  Agent(text::TextEncoder encoder, AgentConfig config)
      : config_(config),
        encoder_(std::move(encoder)),
        q_(encoder_.output_dim()),
        buffer_(static_cast<std::size_t>(config.replay_capacity), combine_seeds(config.seed, 2)),
        adam_(num::AdamConfig{config.lr, 0.9, 0.999, 1e-8}),
        policy_rng_(combine_seeds(config.seed, 3)) {
    config_.validate();
    if (config_.fine_tune_encoder != encoder_.trainable()) {
      throw ConfigError("fine_tune_encoder does not match the encoder's frozen flag");
    }
    Rng init(combine_seeds(config.seed, 1));
    q_.init_glorot(init);
  }

  const AgentConfig& config() const { return config_; }
  text::TextEncoder& encoder() { return encoder_; }
  const text::TextEncoder& encoder() const { return encoder_; }
  QNetworkParams& qnet() { return q_; }
  const QNetworkParams& qnet() const { return q_; }
  ReplayBuffer& buffer() { return buffer_; }
  num::Adam& optimizer() { return adam_; }
  Rng& policy_rng() { return policy_rng_; }

  // Everything the optimizer updates: the Q-network, plus the encoder when
  // it is fine-tuned.
  num::ParamSet trainable_parameters() {
    num::ParamSet set = q_.parameters();
    set.append(encoder_.trainable_parameters());
    return set;
  }

  // Q-network and encoder parameters, in checkpoint order.
  num::ParamSet all_parameters() {
    num::ParamSet set = q_.parameters();
    set.append(encoder_.parameters());
    return set;
  }

  const num::Vector& encode(const std::string& text) {
    auto it = cache_.find(text);
    if (it == cache_.end()) it = cache_.emplace(text, encoder_.encode(text)).first;
    return it->second;
  }

  num::Vector q_values(const std::string& obs, const std::vector<std::string>& actions) {
    const num::Vector h = state_hidden(encode(obs), q_);
    num::Vector q(static_cast<Eigen::Index>(actions.size()));
    for (std::size_t i = 0; i < actions.size(); ++i) {
      q(static_cast<Eigen::Index>(i)) = q_from_hidden(h, encode(actions[i]), q_);
    }
    return q;
  }

  std::size_t act(const std::string& obs, const std::vector<std::string>& actions, Policy mode) {
    return select_action(q_values(obs, actions), mode, policy_rng_);
  }

  void remember(Transition t) { buffer_.push(std::move(t)); }

  // Counts one environment step; true when an update is due.
  bool tick() { return ++env_steps_ % config_.train_every == 0; }
  long env_steps() const { return env_steps_; }

  // Bootstrapped targets under the current parameters.
  std::vector<double> targets(const std::vector<Transition>& batch) {
    std::vector<double> out;
    out.reserve(batch.size());
    for (const Transition& t : batch) {
      double max_next = 0.0;
      if (!t.done && !t.next_admissible_actions.empty()) {
        max_next = q_values(t.next_obs_text, t.next_admissible_actions).maxCoeff();
      }
      out.push_back(td_target(t.reward, config_.gamma, max_next, t.done));
    }
    return out;
  }

  // Mean squared TD error of `batch` against fixed targets. Zeroes and then
  // fills the gradients of trainable_parameters().
  double batch_loss(const std::vector<Transition>& batch, const std::vector<double>& target) {
    num::ParamSet params = trainable_parameters();
    params.zero_grad();
    if (batch.empty()) return 0.0;
    const bool through_encoder = encoder_.trainable();

    struct Encoded {
      num::Vector value;
      text::EncodeTrace trace;
      num::Vector grad;
    };
    std::unordered_map<std::string, Encoded> encoded;
    auto encode_traced = [&](const std::string& s) -> Encoded& {
      auto it = encoded.find(s);
      if (it != encoded.end()) return it->second;
      Encoded e;
      if (through_encoder) {
        e.value = encoder_.encode(s, e.trace);
      } else {
        e.value = encode(s);
      }
      e.grad = num::Vector::Zero(e.value.size());
      return encoded.emplace(s, std::move(e)).first->second;
    };

    const double scale = 1.0 / static_cast<double>(batch.size());
    const num::Vector zero = num::Vector::Zero(q_.hidden_size());
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Encoded& o = encode_traced(batch[i].obs_text);
      Encoded& a = encode_traced(batch[i].action_text);
      num::GruCellCache c1, c2;
      const num::Vector h1 = num::gru_cell_forward(q_.sa_gru, o.value, zero, &c1);
      const num::Vector h2 = num::gru_cell_forward(q_.sa_gru, a.value, h1, &c2);
      const double q = q_.head.W.value.row(0).dot(h2) + q_.head.b.value(0, 0);
      const num::TdLoss l = num::squared_td_loss(q, target[i]);
      total += l.loss;

      const double dq = l.dq * scale;
      q_.head.W.grad.row(0) += dq * h2.transpose();
      q_.head.b.grad(0, 0) += dq;
      const num::Vector dh2 = dq * q_.head.W.value.row(0).transpose();
      const num::GruCellGrads g2 = num::gru_cell_backward(q_.sa_gru, c2, dh2);
      const num::GruCellGrads g1 = num::gru_cell_backward(q_.sa_gru, c1, g2.dh_prev);
      if (through_encoder) {
        a.grad += g2.dx;
        o.grad += g1.dx;
      }
    }
    if (through_encoder) {
      // Fixed order keeps gradient accumulation deterministic.
      std::vector<const std::string*> keys;
      for (const auto& [k, v] : encoded) keys.push_back(&k);
      std::sort(keys.begin(), keys.end(), [](const auto* x, const auto* y) { return *x < *y; });
      for (const std::string* k : keys) {
        const Encoded& e = encoded.at(*k);
        encoder_.backward(e.trace, e.grad);
      }
    }
    return total * scale;
  }

  // One sampled minibatch update. nullopt while the buffer is below warmup.
  std::optional<double> train_step() {
    if (buffer_.size() < static_cast<std::size_t>(config_.warmup_transitions)) return std::nullopt;
    const std::vector<Transition> batch = buffer_.sample(static_cast<std::size_t>(config_.batch_size));
    const std::vector<double> target = targets(batch);
    const double loss = batch_loss(batch, target);
    adam_.step(trainable_parameters());
    if (encoder_.trainable()) cache_.clear();
    return loss;
  }

  void clear_cache() { cache_.clear(); }

 private:
  AgentConfig config_;
  text::TextEncoder encoder_;
  QNetworkParams q_;
  ReplayBuffer buffer_;
  num::Adam adam_;
  Rng policy_rng_;
  long env_steps_ = 0;
  std::unordered_map<std::string, num::Vector> cache_;
};

struct EpisodeResult {
  int score = 0;
  int max_score = 0;
  double normalized = 0.0;
  int moves = 0;
  std::optional<double> mean_loss;  // empty when no update ran
  std::vector<std::string> actions;
  std::vector<Transition> transitions;  // filled when learning
};

inline EpisodeResult finish_episode(const engine::Env& env, std::vector<std::string> actions,
                                    double loss_sum, int updates) {
  EpisodeResult r;
  r.score = env.state().score;
  r.max_score = env.max_score();
  r.normalized = engine::normalized_score(r.score, r.max_score);
  r.moves = env.state().steps;
  if (updates > 0) r.mean_loss = loss_sum / updates;
  r.actions = std::move(actions);
  return r;
}

// reset/step loop. With learn set, every transition goes to replay and an
// update runs every train_every steps. Running out of steps is stored as a
// non-terminal transition; only completing every goal is terminal.
inline EpisodeResult play_episode(engine::Env& env, Agent& agent, Policy mode, bool learn) {
  engine::Observation obs = env.reset();
  std::vector<std::string> taken;
  std::vector<Transition> transitions;
  double loss_sum = 0.0;
  int updates = 0;
  bool done = false;
  while (!done) {
    const std::size_t idx = agent.act(obs.text, obs.admissible_actions, mode);
    const std::string action = obs.admissible_actions[idx];
    engine::StepOutcome out = env.step(action);
    taken.push_back(action);
    done = out.done;
    if (learn) {
      Transition t{obs.text, action, static_cast<double>(out.reward), out.observation.text,
                   out.observation.admissible_actions, out.done && env.goals_complete()};
      transitions.push_back(t);
      agent.remember(std::move(t));
      if (agent.tick()) {
        if (auto loss = agent.train_step()) {
          loss_sum += *loss;
          ++updates;
        }
      }
    }
    obs = std::move(out.observation);
  }
  EpisodeResult r = finish_episode(env, std::move(taken), loss_sum, updates);
  r.transitions = std::move(transitions);
  return r;
}

// Replays a fixed action list, stopping early if the episode ends.
inline EpisodeResult play_scripted(engine::Env& env, const std::vector<std::string>& plan) {
  env.reset();
  std::vector<std::string> taken;
  for (const std::string& a : plan) {
    if (env.state().done) break;
    env.step(a);
    taken.push_back(a);
  }
  return finish_episode(env, std::move(taken), 0.0, 0);
}

}  // namespace tbrl::agent

// Randomized invariant suites. Each property runs kCases generated cases.

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "agents.hpp"

using namespace tbrl;

namespace {

constexpr int kCases = 120;

// Graph identity ignores the step counter; done means every goal paid.
using Key = std::tuple<int, std::vector<engine::Location>, std::vector<bool>, std::vector<bool>, int, bool>;

Key key(const engine::GameState& s, const engine::GameSpec& g) {
  return {s.current_room, s.placements, s.open_flags, s.goal_satisfied, s.score, s.score == g.max_score()};
}

struct Edge {
  std::string action;
  int reward;
  Key target;
  auto operator<=>(const Edge&) const = default;
};

using Graph = std::map<Key, std::set<Edge>>;

Graph engine_graph(const engine::GameSpec& g) {
  const engine::StateGraph sg = engine::explore_state_graph(g);
  EXPECT_FALSE(sg.truncated);
  Graph out;
  for (std::size_t i = 0; i < sg.states.size(); ++i) {
    const engine::GameState& s = sg.states[i];
    auto& edges = out[key(s, g)];
    for (const auto& e : sg.edges[i]) {
      edges.insert({engine::describe_action(e.action, s, g, g.template_set_id), e.reward,
                    key(sg.states[static_cast<std::size_t>(e.target)], g)});
    }
  }
  return out;
}

// The same exploration, driven only through the wrapper's displayed actions.
Graph wrapped_graph(const engine::GameSpec& g, perturb::PerturbMode mode, const perturb::Lexicon& lex) {
  perturb::PerturbedEnv env(g, mode, lex, 5);
  Graph out;
  std::vector<engine::GameState> frontier{engine::initial_state(g)};
  out[key(frontier[0], g)];
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const engine::GameState s = frontier[head];
    if (s.done) continue;
    const auto shown = env.restore(s).admissible_actions;
    for (const auto& d : shown) {
      env.restore(s);
      const std::string canonical = env.engine_action(d);
      const auto outcome = env.step(d);
      engine::GameState t = env.state();
      t.steps = 0;
      out[key(s, g)].insert({canonical, outcome.reward, key(t, g)});
      if (out.emplace(key(t, g), std::set<Edge>{}).second) frontier.push_back(t);
    }
  }
  return out;
}

}  // namespace

TEST(Property, ReplayFifoAndCapacity) {
  Rng rng(101);
  for (int c = 0; c < kCases; ++c) {
    const std::size_t cap = 1 + rng.below(40);
    const std::size_t n = rng.below(150);
    agent::ReplayBuffer b(cap, rng.next());
    for (std::size_t i = 0; i < n; ++i) {
      b.push({"o" + std::to_string(i), "look", 0.0, "n", {"look"}, false});
      ASSERT_LE(b.size(), cap);
    }
    const std::size_t kept = std::min(n, cap);
    ASSERT_EQ(b.size(), kept);
    for (std::size_t i = 0; i < kept; ++i) ASSERT_EQ(b.at(i).obs_text, "o" + std::to_string(n - kept + i));
    if (kept == 0) continue;
    for (const auto& t : b.sample(16)) {
      const int idx = std::stoi(t.obs_text.substr(1));
      ASSERT_GE(idx, static_cast<int>(n - kept));
    }
  }
}

TEST(Property, SoftmaxNormalizedAndShiftInvariant) {
  Rng rng(102);
  for (int c = 0; c < kCases; ++c) {
    num::Vector v(static_cast<Eigen::Index>(1 + rng.below(20)));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-50.0, 50.0);
    const double shift = rng.uniform(-100.0, 100.0);
    const num::Vector p = num::softmax(v);
    ASSERT_NEAR(p.sum(), 1.0, 1e-9);
    ASSERT_TRUE((p.array() >= 0.0).all());
    const num::Vector q = num::softmax((v.array() + shift).matrix());
    ASSERT_LE((p - q).cwiseAbs().maxCoeff(), 1e-12);
    // Greedy choice is unaffected by the shift as well.
    Rng unused(0);
    ASSERT_EQ(agent::select_action(v, agent::Policy::greedy, unused),
              agent::select_action((v.array() + shift).matrix(), agent::Policy::greedy, unused));
  }
}

TEST(Property, TdFixedPointLeavesParametersUnchanged) {
  Rng rng(103);
  const text::EncoderKind kinds[] = {text::EncoderKind::hash, text::EncoderKind::embedding_frozen,
                                     text::EncoderKind::embedding_finetuned};
  int bootstrapped = 0;
  for (int c = 0; c < kCases; ++c) {
    agent::Agent a = fixtures::small_agent(kinds[c % 3], rng.next());
    const auto spec = engine::generate_game(engine::Difficulty::medium, rng.next(), fixtures::pool(), engine::VocabMode::id);
    const double gamma = a.config().gamma;
    std::vector<agent::Transition> batch;
    engine::GameState s = engine::initial_state(spec);
    for (int k = 0; k < 6 && !s.done; ++k) {
      const auto acts = engine::admissible_actions(s, spec);
      const std::string act = acts[rng.below(acts.size())];
      const std::string obs = engine::render_observation(s, spec, 0);
      const auto r = engine::step(s, spec, act);
      const double q = a.q_values(obs, {act})(0);
      agent::Transition t{obs, act, q, r.observation.text, r.observation.admissible_actions, true};
      if (k % 2 == 1 && !r.done) {
        // Bootstrapped case: pick the reward so that r + gamma * max Q' == Q exactly.
        const double m = a.q_values(t.next_obs_text, t.next_admissible_actions).maxCoeff();
        double reward = q - gamma * m;
        for (int tries = 0; tries < 8 && reward + gamma * m != q; ++tries) {
          reward = std::nextafter(reward, reward + gamma * m < q ? INFINITY : -INFINITY);
        }
        if (reward + gamma * m == q) {
          t.reward = reward;
          t.done = false;
          ++bootstrapped;
        }
      }
      batch.push_back(t);
      s = r.state;
    }
    for (const auto& t : batch) a.remember(t);
    while (a.buffer().size() < 4) a.remember(batch.front());
    const std::string before = fixtures::param_bytes(a.all_parameters());
    const auto loss = a.train_step();
    ASSERT_TRUE(loss.has_value());
    ASSERT_EQ(*loss, 0.0);
    for (const num::Param* p : a.trainable_parameters()) ASSERT_TRUE(p->grad.isZero(0.0)) << p->name;
    ASSERT_EQ(fixtures::param_bytes(a.all_parameters()), before);
    // Off the fixed point the same update does move the head.
    agent::Transition shifted = batch.front();
    shifted.reward += 1.0;
    for (int k = 0; k < 200; ++k) a.remember(shifted);
    ASSERT_GT(*a.train_step(), 0.0);
    ASSERT_NE(fixtures::param_bytes(a.all_parameters()), before);
  }
  EXPECT_GT(bootstrapped, kCases / 2);
}

TEST(Property, NormalizedScoreBounds) {
  Rng rng(104);
  for (int c = 0; c < kCases; ++c) {
    const int m = 1 + static_cast<int>(rng.below(20));
    const int s = static_cast<int>(rng.below(static_cast<std::size_t>(m) + 1));
    const double n = engine::normalized_score(s, m);
    ASSERT_GE(n, 0.0);
    ASSERT_LE(n, 1.0);
    ASSERT_EQ(n, static_cast<double>(s) / m);
  }
  agent::Agent a = fixtures::small_agent(text::EncoderKind::hash, 1);
  for (int c = 0; c < kCases; ++c) {
    engine::GameEnv env(fixtures::random_spec(rng));
    const auto r = agent::play_episode(env, a, c % 2 ? agent::Policy::greedy : agent::Policy::sample, false);
    ASSERT_GE(r.normalized, 0.0);
    ASSERT_LE(r.normalized, 1.0);
    ASSERT_GE(r.moves, 1);
    ASSERT_LE(r.moves, env.spec().max_steps);
    ASSERT_LE(r.score, r.max_score);
  }
}

TEST(Property, PerturbationPreservesStateGraph) {
  Rng rng(105);
  const perturb::Lexicon lex = perturb::lexicon_from_pool(fixtures::pool());
  for (int c = 0; c < kCases; ++c) {
    const auto d = c % 2 ? engine::Difficulty::easy : engine::Difficulty::medium;
    const auto mode = rng.below(2) ? engine::VocabMode::id : engine::VocabMode::ood;
    const auto spec = engine::generate_game(d, rng.next(), fixtures::pool(), mode);
    const Graph base = engine_graph(spec);
    for (auto pm : {perturb::PerturbMode::none, perturb::PerturbMode::paraphrase, perturb::PerturbMode::lexical}) {
      ASSERT_EQ(wrapped_graph(spec, pm, lex), base) << "case " << c << " mode " << perturb::to_string(pm);
    }
  }
}

TEST(Property, TemplateFactEquivalence) {
  Rng rng(106);
  for (int c = 0; c < kCases; ++c) {
    const auto spec = fixtures::random_spec(rng);
    const auto state = fixtures::random_state(spec, rng);
    const fixtures::Facts expected = fixtures::expected_facts(state, spec);
    for (int set = 0; set < engine::template_set_count(); ++set) {
      const std::string text = engine::render_observation(state, spec, set);
      ASSERT_EQ(fixtures::extract_facts(text, set), expected) << "set " << set << ": " << text;
    }
  }
}

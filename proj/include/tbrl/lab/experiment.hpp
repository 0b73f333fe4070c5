#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tbrl/agent/agent.hpp"
#include "tbrl/agent/checkpoint.hpp"
#include "tbrl/engine/env.hpp"
#include "tbrl/lab/aggregate.hpp"
#include "tbrl/lab/config.hpp"
#include "tbrl/lab/drift.hpp"
#include "tbrl/lab/games.hpp"
#include "tbrl/perturb/lexicon.hpp"
#include "tbrl/perturb/wrap.hpp"
#include "tbrl/textenc/embedding.hpp"
#include "tbrl/textenc/encoder.hpp"

namespace tbrl::lab {

// Shared read-only inputs of every run in an experiment.
struct Resources {
  engine::ConceptPool pool;
  std::optional<text::EmbeddingTable> pretrained;
  perturb::Lexicon lexicon;
  GameSuite suite;
};

inline Resources load_resources(const ExperimentConfig& c) {
  engine::ConceptPool pool = load_pool(c);
  std::optional<text::EmbeddingTable> pretrained;
  if (c.encoder != text::EncoderKind::hash) {
    pretrained = c.embeddings.empty() ? text::synth_pretrain(pool, c.embedding_dim, c.pretrain_seed)
                                      : text::load_embedding_file(c.embeddings);
  }
  perturb::Lexicon lexicon =
      c.lexicon.empty() ? perturb::lexicon_from_pool(pool) : perturb::load_lexicon(c.lexicon);
  GameSuite suite = build_suite(c, pool);
  return {std::move(pool), std::move(pretrained), std::move(lexicon), std::move(suite)};
}

inline agent::Agent make_agent(const ExperimentConfig& c, const Resources& res, std::uint64_t run_seed) {
  agent::AgentConfig ac = c.agent;
  ac.seed = run_seed;
  ac.fine_tune_encoder = c.encoder == text::EncoderKind::embedding_finetuned;
  if (c.encoder == text::EncoderKind::hash) {
    return agent::Agent(text::TextEncoder::hash(c.hidden_dim, c.hash_salt), ac);
  }
  return agent::Agent(text::TextEncoder::embedding(*res.pretrained, c.hidden_dim, !ac.fine_tune_encoder,
                                                   combine_seeds(run_seed, 11), c.encoder_gate_bias),
                      ac);
}

struct EpisodeRow {
  std::uint64_t run_seed = 0;
  int episode = 0;
  std::string game_id;
  int score = 0;
  int max_score = 0;
  double normalized = 0.0;
  int moves = 0;
  std::optional<double> mean_loss;
};

struct EvalRow {
  std::uint64_t run_seed = 0;
  std::string game_set;  // train, id or ood
  perturb::PerturbMode mode = perturb::PerturbMode::none;
  std::string game_id;
  int score = 0;
  int max_score = 0;
  double normalized = 0.0;
  int moves = 0;
};

struct RunRecord {
  std::uint64_t run_seed = 0;
  std::vector<EpisodeRow> episodes;
  std::vector<EvalRow> evals;
  TokenCorpus corpus;
};

inline std::string game_id(const std::string& set, std::size_t i) { return set + "-" + std::to_string(i); }

// Trains for c.episodes episodes, cycling through the training games.
inline void train_agent(agent::Agent& a, const ExperimentConfig& c, const Resources& res, RunRecord& rec) {
  const auto& games = res.suite.train;
  for (int e = 0; e < c.episodes; ++e) {
    const std::size_t g = static_cast<std::size_t>(e) % games.size();
    engine::GameEnv env(games[g]);
    const agent::EpisodeResult r = agent::play_episode(env, a, agent::Policy::sample, true);
    rec.episodes.push_back({rec.run_seed, e, game_id("train", g), r.score, r.max_score, r.normalized,
                            r.moves, r.mean_loss});
    for (const agent::Transition& t : r.transitions) {
      rec.corpus.add(t.obs_text, t.reward > 0.0);
      rec.corpus.add(t.action_text, t.reward > 0.0);
    }
  }
}

inline std::vector<EvalRow> evaluate(agent::Agent& a, const std::vector<engine::GameSpec>& games,
                                     const std::string& set, perturb::PerturbMode mode,
                                     const ExperimentConfig& c, const Resources& res, std::uint64_t run_seed) {
  std::vector<EvalRow> rows;
  for (std::size_t g = 0; g < games.size(); ++g) {
    perturb::PerturbedEnv env(games[g], mode, res.lexicon, c.perturb_seed, c.lexical_rate);
    const agent::EpisodeResult r = agent::play_episode(env, a, agent::Policy::greedy, false);
    rows.push_back({run_seed, set, mode, game_id(set, g), r.score, r.max_score, r.normalized, r.moves});
  }
  return rows;
}

// Greedy evaluation: ID and OOD sets unperturbed, then the training games
// under every configured perturbation mode.
inline std::vector<EvalRow> evaluate_all(agent::Agent& a, const ExperimentConfig& c, const Resources& res,
                                         std::uint64_t run_seed, bool id_ood, bool perturbations) {
  std::vector<EvalRow> rows;
  auto append = [&](std::vector<EvalRow> more) { rows.insert(rows.end(), more.begin(), more.end()); };
  if (id_ood) {
    append(evaluate(a, res.suite.eval_id, "id", perturb::PerturbMode::none, c, res, run_seed));
    append(evaluate(a, res.suite.eval_ood, "ood", perturb::PerturbMode::none, c, res, run_seed));
  }
  if (perturbations) {
    for (perturb::PerturbMode m : c.perturb_modes) {
      append(evaluate(a, res.suite.train, "train", m, c, res, run_seed));
    }
  }
  return rows;
}

inline std::filesystem::path run_dir(const std::filesystem::path& out, std::uint64_t seed) {
  return out / ("run_" + std::to_string(seed));
}

// Trains and evaluates one seed, writing its checkpoint, snapshots and corpus
// under run_<seed>/.
inline RunRecord run_single(const ExperimentConfig& c, const Resources& res, std::uint64_t run_seed,
                            const std::filesystem::path& out) {
  RunRecord rec;
  rec.run_seed = run_seed;
  agent::Agent a = make_agent(c, res, run_seed);
  const auto dir = run_dir(out, run_seed);
  std::filesystem::create_directories(dir);
  if (const auto* p = a.encoder().params()) {
    text::save_embedding_file(p->embedding, dir / "snapshot_start.txt", true);
  }
  train_agent(a, c, res, rec);
  rec.evals = evaluate_all(a, c, res, run_seed, true, true);
  agent::save_checkpoint(a, dir / "checkpoint.txt");
  if (const auto* p = a.encoder().params()) text::save_embedding_file(p->embedding, dir / "snapshot_end.txt");
  std::ofstream corpus(dir / "corpus.tsv", std::ios::binary);
  write_corpus(corpus, rec.corpus);
  return rec;
}

inline std::vector<RunScore> run_scores(const std::string& encoder, const std::vector<EvalRow>& rows) {
  using Key = std::tuple<std::uint64_t, std::string, std::string>;
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const EvalRow& r : rows) {
    auto& g = groups[{r.run_seed, r.game_set, std::string(perturb::to_string(r.mode))}];
    g.first.push_back(r.normalized);
    g.second.push_back(r.moves);
  }
  std::vector<RunScore> out;
  for (const auto& [key, v] : groups) {
    RunScore s;
    s.encoder = encoder;
    std::tie(s.run_seed, s.game_set, s.mode) = key;
    s.score = mean_std(v.first).mean;
    s.moves = mean_std(v.second).mean;
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_episodes_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << "run_seed,episode,game_id,score,max_score,normalized_score,moves,mean_loss\n";
  for (const RunRecord& rec : runs) {
    for (const EpisodeRow& r : rec.episodes) {
      out << r.run_seed << ',' << r.episode << ',' << r.game_id << ',' << r.score << ',' << r.max_score
          << ',' << text::format_double(r.normalized) << ',' << r.moves << ','
          << (r.mean_loss ? text::format_double(*r.mean_loss) : "") << '\n';
    }
  }
}

inline void write_eval_csv(std::ostream& out, const std::vector<EvalRow>& rows) {
  out << "run_seed,game_set,perturb_mode,game_id,score,max_score,normalized_score,moves\n";
  for (const EvalRow& r : rows) {
    out << r.run_seed << ',' << r.game_set << ',' << perturb::to_string(r.mode) << ',' << r.game_id << ','
        << r.score << ',' << r.max_score << ',' << text::format_double(r.normalized) << ',' << r.moves
        << '\n';
  }
}

inline void write_summaries(const std::filesystem::path& out, const std::string& encoder,
                            const std::vector<EvalRow>& rows, const std::string& stem = "summary") {
  const auto summary = aggregate(run_scores(encoder, rows));
  std::ofstream csv(out / (stem + ".csv"), std::ios::binary);
  write_summary_csv(csv, summary);
  std::ofstream txt(out / (stem + ".txt"), std::ios::binary);
  write_summary_text(txt, summary);
}

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<EvalRow> evals() const {
    std::vector<EvalRow> all;
    for (const RunRecord& r : runs) all.insert(all.end(), r.evals.begin(), r.evals.end());
    return all;
  }
};

// Runs every seed (config.workers at a time), then writes episodes.csv,
// eval.csv, summary.csv/txt and the resolved config.json into out_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  c.validate();
  const Resources res = load_resources(c);
  const std::filesystem::path out = c.out_dir;
  std::filesystem::create_directories(out);
  const std::vector<std::uint64_t> seeds = c.run_seeds();

  ExperimentResult result;
  result.runs.resize(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < seeds.size(); i += static_cast<std::size_t>(c.workers)) {
      try {
        result.runs[i] = run_single(c, res, seeds[i], out);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (c.workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < c.workers; ++w) pool.emplace_back(work, static_cast<std::size_t>(w));
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  {
    std::ofstream f(out / "config.json", std::ios::binary);
    f << to_json(c).dump(2) << '\n';
  }
  {
    std::ofstream f(out / "episodes.csv", std::ios::binary);
    write_episodes_csv(f, result.runs);
  }
  const auto evals = result.evals();
  {
    std::ofstream f(out / "eval.csv", std::ios::binary);
    write_eval_csv(f, evals);
  }
  write_summaries(out, std::string(text::to_string(c.encoder)), evals);
  return result;
}

// Re-evaluates saved checkpoints of a finished experiment.
inline std::vector<EvalRow> evaluate_checkpoints(const ExperimentConfig& c, bool id_ood, bool perturbations) {
  const Resources res = load_resources(c);
  std::vector<EvalRow> rows;
  for (std::uint64_t seed : c.run_seeds()) {
    agent::Agent a = make_agent(c, res, seed);
    agent::load_checkpoint(a, run_dir(c.out_dir, seed) / "checkpoint.txt");
    auto more = evaluate_all(a, c, res, seed, id_ood, perturbations);
    rows.insert(rows.end(), more.begin(), more.end());
  }
  return rows;
}

}  // namespace tbrl::lab

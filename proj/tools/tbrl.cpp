// Command-line front end: gen, train, eval, perturb-eval, drift, project, play.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tbrl/tbrl.hpp"

namespace fs = std::filesystem;
using namespace tbrl;

namespace {

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int workers = 0;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON); defaults apply when omitted");
  cmd->add_option("--seed", o.seed, "Run a single seed instead of the configured list");
  cmd->add_option("--out-dir", o.out_dir, "Output directory (overrides the config)");
  cmd->add_option("--workers", o.workers, "Parallel runs (overrides the config)");
}

lab::ExperimentConfig resolve_config(const RunOptions& o) {
  lab::ExperimentConfig c;
  if (!o.config.empty()) c = lab::load_experiment_config(o.config);
  if (o.seed) {
    c.seeds = {*o.seed};
    c.n_runs = 1;
  }
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (o.workers > 0) c.workers = o.workers;
  c.agent.fine_tune_encoder = c.encoder == text::EncoderKind::embedding_finetuned;
  c.validate();
  return c;
}

void write_eval_outputs(const lab::ExperimentConfig& c, const std::vector<lab::EvalRow>& rows,
                        const std::string& stem) {
  const fs::path out = c.out_dir;
  fs::create_directories(out);
  std::ofstream csv(out / (stem + ".csv"), std::ios::binary);
  lab::write_eval_csv(csv, rows);
  lab::write_summaries(out, std::string(text::to_string(c.encoder)), rows, "summary_" + stem);
  std::ifstream txt(out / ("summary_" + stem + ".txt"));
  std::cout << txt.rdbuf();
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

engine::ConceptPool pool_from(const std::string& path) {
  return engine::load_concept_pool(path.empty() ? lab::default_data_dir() / "concepts.json" : fs::path(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-game RL lab: game generation, DRRN training, perturbation and drift analysis"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Write generated game specs as JSON files");
  std::string gen_difficulty = "easy", gen_mode = "id", gen_pool, gen_out = "games";
  int gen_count = 5;
  std::uint64_t gen_seed = 1;
  gen->add_option("--difficulty", gen_difficulty, "easy, medium or hard");
  gen->add_option("--count", gen_count, "Number of games");
  gen->add_option("--seed", gen_seed, "Seed of the first game; later games use seed + i");
  gen->add_option("--mode", gen_mode, "Vocabulary: id or ood");
  gen->add_option("--pool", gen_pool, "Concept pool file");
  gen->add_option("--out-dir", gen_out, "Output directory");

  RunOptions train_opts, eval_opts, perturb_opts;
  auto* train = app.add_subcommand("train", "Train and evaluate every configured run");
  add_run_options(train, train_opts);
  auto* eval = app.add_subcommand("eval", "Greedy ID/OOD evaluation of saved checkpoints");
  add_run_options(eval, eval_opts);
  auto* perturb_eval = app.add_subcommand("perturb-eval", "Perturbation evaluation of saved checkpoints");
  add_run_options(perturb_eval, perturb_opts);

  // drift
  auto* drift = app.add_subcommand("drift", "Embedding drift between start and end snapshots");
  std::string drift_run, drift_start, drift_end, drift_corpus, drift_out, drift_pair;
  std::size_t drift_top = 10;
  drift->add_option("--run-dir", drift_run, "A run_<seed> directory written by train");
  drift->add_option("--start", drift_start, "Start snapshot (default <run-dir>/snapshot_start.txt)");
  drift->add_option("--end", drift_end, "End snapshot (default <run-dir>/snapshot_end.txt)");
  drift->add_option("--corpus", drift_corpus, "Token corpus (default <run-dir>/corpus.tsv)");
  drift->add_option("--top", drift_top, "How many most-drifted tokens to list");
  drift->add_option("--pair", drift_pair, "Two tokens X,Y: report their cosine distance before and after");
  drift->add_option("--out", drift_out, "CSV output (default <run-dir>/drift.csv)");

  // project
  auto* project = app.add_subcommand("project", "PCA projection of embedding rows to 2D");
  std::string proj_start, proj_end, proj_tokens, proj_out = "projection.csv";
  project->add_option("--embeddings", proj_start, "Embedding file")->required();
  project->add_option("--end", proj_end, "Second snapshot projected jointly (labels gain @start/@end)");
  project->add_option("--tokens", proj_tokens, "Comma-separated tokens (default: whole vocabulary)");
  project->add_option("--out", proj_out, "CSV output");

  // play
  auto* play = app.add_subcommand("play", "Play a game interactively");
  std::string play_game, play_difficulty = "easy", play_mode = "id", play_perturb = "none", play_pool,
                         play_lexicon;
  std::uint64_t play_seed = 1;
  play->add_option("--game", play_game, "Game spec file (otherwise one is generated)");
  play->add_option("--difficulty", play_difficulty, "easy, medium or hard");
  play->add_option("--seed", play_seed, "Game seed");
  play->add_option("--mode", play_mode, "Vocabulary: id or ood");
  play->add_option("--perturb", play_perturb, "none, paraphrase or lexical");
  play->add_option("--pool", play_pool, "Concept pool file");
  play->add_option("--lexicon", play_lexicon, "Lexicon file for lexical mode");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto paths =
          lab::gen_games(engine::parse_difficulty(gen_difficulty), gen_count, gen_seed,
                         engine::parse_vocab_mode(gen_mode), pool_from(gen_pool), gen_out);
      for (const auto& p : paths) std::cout << p.string() << '\n';
    } else if (*train) {
      const auto c = resolve_config(train_opts);
      lab::run_experiment(c);
      std::ifstream txt(fs::path(c.out_dir) / "summary.txt");
      std::cout << txt.rdbuf();
    } else if (*eval) {
      const auto c = resolve_config(eval_opts);
      write_eval_outputs(c, lab::evaluate_checkpoints(c, true, false), "eval_checkpoints");
    } else if (*perturb_eval) {
      const auto c = resolve_config(perturb_opts);
      write_eval_outputs(c, lab::evaluate_checkpoints(c, false, true), "perturb");
    } else if (*drift) {
      const fs::path run = drift_run;
      auto pick = [&](const std::string& given, const char* default_name) {
        if (!given.empty()) return fs::path(given);
        if (drift_run.empty()) throw ConfigError("pass --run-dir or every input file explicitly");
        return run / default_name;
      };
      const auto start = text::load_embedding_file(pick(drift_start, "snapshot_start.txt"));
      const auto end = text::load_embedding_file(pick(drift_end, "snapshot_end.txt"));
      const auto corpus = lab::load_corpus(pick(drift_corpus, "corpus.tsv"));
      const auto report = lab::drift_report(start, end, corpus, drift_top);
      const fs::path out = !drift_out.empty() ? fs::path(drift_out) : run / "drift.csv";
      std::ofstream csv(out, std::ios::binary);
      lab::write_drift_csv(csv, report);
      for (auto e : {lab::Exposure::rewarded, lab::Exposure::unrewarded, lab::Exposure::never}) {
        const auto i = static_cast<std::size_t>(e);
        std::cout << lab::to_string(e) << ": " << report.count[i] << " tokens, mean drift "
                  << report.mean[i] << '\n';
      }
      std::cout << "most drifted:\n";
      for (const auto& r : report.top) std::cout << "  " << r.token << ' ' << r.distance << '\n';
      if (!drift_pair.empty()) {
        const auto pair = split_commas(drift_pair);
        if (pair.size() != 2) throw ConfigError("--pair takes two tokens X,Y");
        std::cout << "distance(" << pair[0] << ", " << pair[1] << "): "
                  << text::cosine_distance(start.vector(pair[0]), start.vector(pair[1])) << " -> "
                  << text::cosine_distance(end.vector(pair[0]), end.vector(pair[1])) << '\n';
      }
      std::cout << "wrote " << out.string() << '\n';
    } else if (*project) {
      const auto start = text::load_embedding_file(proj_start);
      std::optional<text::EmbeddingTable> end;
      if (!proj_end.empty()) end = text::load_embedding_file(proj_end);
      const std::vector<std::string> tokens = proj_tokens.empty() ? start.tokens() : split_commas(proj_tokens);
      std::vector<std::string> labels;
      std::vector<num::Vector> rows;
      for (const auto& t : tokens) {
        if (!start.contains(t)) throw ConfigError("token '" + t + "' is not in the embedding file");
        labels.push_back(end ? t + "@start" : t);
        rows.push_back(start.vector(t));
      }
      if (end) {
        for (const auto& t : tokens) {
          labels.push_back(t + "@end");
          rows.push_back(end->vector(t));
        }
      }
      num::Matrix m(static_cast<Eigen::Index>(rows.size()), start.dim());
      for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      const auto proj = lab::project_2d(m);
      std::ofstream csv(proj_out, std::ios::binary);
      lab::write_projection_csv(csv, labels, proj);
      std::cout << "wrote " << proj_out << (proj.degenerate ? " (degenerate input)" : "") << '\n';
    } else if (*play) {
      const auto pool = pool_from(play_pool);
      const engine::GameSpec spec =
          !play_game.empty() ? engine::load_game_spec(play_game)
                             : engine::generate_game(engine::parse_difficulty(play_difficulty), play_seed,
                                                     pool, engine::parse_vocab_mode(play_mode));
      const perturb::Lexicon lexicon =
          play_lexicon.empty() ? perturb::lexicon_from_pool(pool) : perturb::load_lexicon(play_lexicon);
      lab::play(spec, perturb::parse_perturb_mode(play_perturb), std::cin, std::cout, lexicon);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

// Prints one [PASS]/[FAIL] line per acceptance criterion; exits non-zero if
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "tbrl/tbrl.hpp"

using namespace tbrl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ": " << detail << std::endl;
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(prec);
  out << v;
  return out.str();
}

const engine::ConceptPool& pool() {
  static const engine::ConceptPool p = engine::load_concept_pool(fs::path(TBRL_DEFAULT_DATA_DIR) / "concepts.json");
  return p;
}

fs::path work_dir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / "tbrl_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  return std::system((std::string("\"") + TBRL_CLI_PATH + "\" " + args + " > /dev/null 2>&1").c_str());
}

// ---------------------------------------------------------------------------

void gradient_fidelity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    agent::AgentConfig c;
    c.seed = seed;
    c.fine_tune_encoder = true;
    agent::Agent a(text::TextEncoder::embedding(text::synth_pretrain(pool(), 6, seed), 5, false,
                                                combine_seeds(seed, 11), -3.0),
                   c);
    const auto spec = engine::generate_game(engine::Difficulty::easy, seed, pool(), engine::VocabMode::id);
    engine::GameState s = engine::initial_state(spec);
    std::vector<agent::Transition> batch;
    Rng rng(seed);
    for (int k = 0; k < 3; ++k) {
      const auto acts = engine::admissible_actions(s, spec);
      const std::string act = acts[rng.below(acts.size())];
      const std::string obs = engine::render_observation(s, spec, spec.template_set_id);
      const auto r = engine::step(s, spec, act);
      batch.push_back({obs, act, static_cast<double>(r.reward), r.observation.text,
                       r.observation.admissible_actions, r.done});
      s = r.state;
    }
    const std::vector<double> targets = a.targets(batch);
    const auto rep = num::grad_check([&] { return a.batch_loss(batch, targets); }, a.trainable_parameters());
    if (rep.max_rel_error >= worst) {
      worst = rep.max_rel_error;
      where = rep.worst_param;
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst < 1e-4 && secs < 30.0,
         "gradient fidelity: max relative error " + fmt(worst * 1e6, 4) + "e-6 (" + where + ") over 5 seeds, " +
             fmt(secs, 1) + " s");
}

// ---------------------------------------------------------------------------

void determinism() {
  const fs::path dir = work_dir() / "determinism";
  fs::create_directories(dir);
  lab::ExperimentConfig c;
  c.difficulty = engine::Difficulty::easy;
  c.encoder = text::EncoderKind::embedding_finetuned;
  c.agent.fine_tune_encoder = true;
  c.n_train_games = 2;
  c.n_eval_games_id = 2;
  c.n_eval_games_ood = 2;
  c.episodes = 15;
  c.n_runs = 2;
  c.embedding_dim = 12;
  c.hidden_dim = 10;
  c.workers = 2;
  {
    std::ofstream f(dir / "config.json");
    f << lab::to_json(c).dump(2);
  }
  const std::string cfg = "--config \"" + (dir / "config.json").string() + "\"";
  // Both runs write to the same directory so the recorded out_dir matches too.
  const std::string out = " --out-dir \"" + (dir / "out").string() + "\"";
  const int rc1 = run_cli("train " + cfg + out);
  if (rc1 == 0) fs::rename(dir / "out", dir / "a");
  const int rc2 = run_cli("train " + cfg + out);
  if (rc2 == 0) fs::rename(dir / "out", dir / "b");
  std::size_t compared = 0;
  std::size_t checkpoints = 0;
  std::string mismatch;
  if (rc1 == 0 && rc2 == 0) {
    std::set<fs::path> files;
    for (const auto& root : {dir / "a", dir / "b"}) {
      for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) files.insert(fs::relative(e.path(), root));
      }
    }
    for (const auto& rel : files) {
      const bool checkpoint = rel.filename().string().rfind("checkpoint", 0) == 0;
      ++compared;
      if (checkpoint) ++checkpoints;
      if (!fs::exists(dir / "a" / rel) || !fs::exists(dir / "b" / rel) ||
          slurp(dir / "a" / rel) != slurp(dir / "b" / rel)) {
        mismatch = rel.string();
      }
    }
  }
  const bool ok = rc1 == 0 && rc2 == 0 && mismatch.empty() && checkpoints > 0 && compared > checkpoints;
  report(2, ok,
         "determinism: two train runs, " + std::to_string(compared) + " output files (" + std::to_string(checkpoints) +
             " checkpoints) compared, " +
             (mismatch.empty() ? std::string("all byte-identical") : "mismatch in " + mismatch));
}

// ---------------------------------------------------------------------------

void solvability() {
  int games = 0;
  int solved = 0;
  int replayed = 0;
  for (auto d : {engine::Difficulty::easy, engine::Difficulty::medium, engine::Difficulty::hard}) {
    for (auto mode : {engine::VocabMode::id, engine::VocabMode::ood}) {
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
        ++games;
        const auto spec = engine::generate_game(d, seed, pool(), mode);
        const auto plan = engine::oracle_solve(spec);
        if (!plan || static_cast<int>(plan->size()) > spec.max_steps) continue;
        ++solved;
        engine::GameEnv env(spec);
        if (agent::play_scripted(env, *plan).normalized == 1.0) ++replayed;
      }
    }
  }
  report(3, solved == games && replayed == games,
         "solvability: oracle solved " + std::to_string(solved) + "/" + std::to_string(games) +
             " within 50 steps, replay scored 1.0 on " + std::to_string(replayed) + "/" + std::to_string(games));
}

// ---------------------------------------------------------------------------

struct Scores {
  double id = 0.0;
  double ood = 0.0;
  double train_none = 0.0;
  double train_lexical = 0.0;
  double seconds = 0.0;
};

// Mean over runs of each run's mean score for one (game set, mode) cell.
double cell(const lab::ExperimentResult& r, const std::string& set, perturb::PerturbMode mode) {
  std::vector<double> per_run;
  for (const auto& run : r.runs) {
    double sum = 0.0;
    int n = 0;
    for (const auto& e : run.evals) {
      if (e.game_set == set && e.mode == mode) {
        sum += e.normalized;
        ++n;
      }
    }
    if (n > 0) per_run.push_back(sum / n);
  }
  return lab::mean_std(per_run).mean;
}

Scores medium_runs(text::EncoderKind kind) {
  lab::ExperimentConfig c;
  c.encoder = kind;
  c.agent.fine_tune_encoder = kind == text::EncoderKind::embedding_finetuned;
  c.perturb_modes = {perturb::PerturbMode::none, perturb::PerturbMode::lexical};
  c.out_dir = (work_dir() / std::string(text::to_string(kind))).string();
  c.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto t0 = Clock::now();
  const auto r = lab::run_experiment(c);
  Scores s;
  s.seconds = seconds_since(t0);
  s.id = cell(r, "id", perturb::PerturbMode::none);
  s.ood = cell(r, "ood", perturb::PerturbMode::none);
  s.train_none = cell(r, "train", perturb::PerturbMode::none);
  s.train_lexical = cell(r, "train", perturb::PerturbMode::lexical);
  std::cout << "  " << text::to_string(kind) << ": id " << fmt(s.id) << ", ood " << fmt(s.ood) << ", train "
            << fmt(s.train_none) << ", train+lexical " << fmt(s.train_lexical) << " (" << fmt(s.seconds, 0)
            << " s)" << std::endl;
  return s;
}

double relative_drop(const Scores& s) {
  return s.train_none > 0.0 ? (s.train_none - s.train_lexical) / s.train_none : 0.0;
}

void orderings() {
  const Scores hash = medium_runs(text::EncoderKind::hash);
  const Scores frozen = medium_runs(text::EncoderKind::embedding_frozen);
  const Scores tuned = medium_runs(text::EncoderKind::embedding_finetuned);
  const double budget = hash.seconds + frozen.seconds;

  report(4, hash.id - hash.ood >= 0.15 && frozen.ood - hash.ood >= 0.15 && budget < 900.0,
         "ID/OOD ordering: (a) hash id - ood = " + fmt(hash.id - hash.ood) + " (need >= 0.15); (b) frozen ood - hash ood = " +
             fmt(frozen.ood - hash.ood) + " (need >= 0.15); " + fmt(budget, 0) + " s");

  const bool a = std::abs(frozen.train_lexical - frozen.train_none) <= 0.2 * frozen.train_none;
  const bool b = relative_drop(tuned) > relative_drop(frozen);
  const bool c = hash.train_lexical <= 0.1 * hash.train_none;
  report(5, a && b && c,
         "fine-tuning vs robustness: (a) frozen lexical " + fmt(frozen.train_lexical) + " vs " + fmt(frozen.train_none) +
             " (within 20%: " + (a ? "yes" : "no") + "); (b) drop fine-tuned " + fmt(relative_drop(tuned)) +
             " > frozen " + fmt(relative_drop(frozen)) + (b ? "" : " (no)") + "; (c) hash lexical " +
             fmt(hash.train_lexical) + " <= 0.1 x " + fmt(hash.train_none) + (c ? "" : " (no)"));
}

// ---------------------------------------------------------------------------

engine::GameSpec scripted_game() {
  engine::GameSpec g;
  g.seed = 0;
  g.difficulty = engine::Difficulty::easy;
  g.rooms = {"kitchen"};
  g.furniture = {{"table", "table", engine::HolderKind::supporter, 0, true},
                 {"fridge", "fridge", engine::HolderKind::container, 0, false}};
  g.objects = {{"apple", "apple", engine::Location::on(0)}};
  g.goals = {{0, 1}};
  return g;
}

// Table rows any text the game can emit may touch.
std::set<std::string> reachable_rows(const engine::GameSpec& g, const text::EmbeddingTable& table) {
  std::set<std::string> rows;
  auto add = [&](const std::string& s) {
    for (const auto& tok : text::tokenize(s)) {
      rows.insert(table.contains(tok) ? tok : std::string(text::kUnkToken));
    }
  };
  const auto graph = engine::explore_state_graph(g);
  for (const auto& s : graph.states) {
    add(engine::render_observation(s, g, g.template_set_id));
    for (const auto& a : engine::admissible_actions(s, g)) add(a);
  }
  return rows;
}

void semantic_degeneration() {
  const engine::GameSpec g = scripted_game();
  const auto table0 = text::synth_pretrain(pool(), 50, 7);
  const auto seen = reachable_rows(g, table0);
  int decreased = 0;
  bool frozen_zero = true;
  bool absent_zero = true;
  std::size_t absent = 0;
  std::string dists;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (bool frozen : {false, true}) {
      agent::AgentConfig c;
      c.seed = seed;
      c.fine_tune_encoder = !frozen;
      agent::Agent a(text::TextEncoder::embedding(table0, 64, frozen, combine_seeds(seed, 11), -3.0), c);
      engine::GameEnv env(g);
      for (int e = 0; e < 100; ++e) agent::play_episode(env, a, agent::Policy::sample, true);
      const auto& t = a.encoder().params()->embedding;
      for (const auto& [tok, d] : text::embedding_drift(t)) {
        if (frozen && d.distance != 0.0) frozen_zero = false;
        if (!seen.contains(tok)) {
          if (seed == 1 && !frozen) ++absent;
          if (d.distance != 0.0) absent_zero = false;
        }
      }
      if (frozen) continue;
      const double before = text::cosine_distance(t.snapshot_vector("apple"), t.snapshot_vector("fridge"));
      const double after = text::cosine_distance(t.vector("apple"), t.vector("fridge"));
      if (after < before) ++decreased;
      dists += (dists.empty() ? "" : ", ") + fmt(before) + "->" + fmt(after);
    }
  }
  report(6, decreased >= 4 && frozen_zero && absent_zero && absent > 0,
         "semantic degeneration: d(apple, fridge) fell in " + std::to_string(decreased) + "/5 seeds [" + dists +
             "]; frozen drift all zero: " + (frozen_zero ? "yes" : "no") + "; " + std::to_string(absent) +
             " tokens absent from the game, zero drift in every run: " + (absent_zero ? "yes" : "no"));
}

// ---------------------------------------------------------------------------

void invariant_suites() {
  const std::string cmd = std::string("\"") + TBRL_UNIT_TESTS_PATH + "\" --gtest_filter='Property.*' 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  int ok = 0;
  int failed = 0;
  if (p != nullptr) {
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p) != nullptr) {
      const std::string line(buf);
      if (line.rfind("[       OK ] Property.", 0) == 0) ++ok;
      if (line.rfind("[  FAILED  ] Property.", 0) == 0) ++failed;
    }
  }
  const int rc = p != nullptr ? pclose(p) : -1;
  report(7, rc == 0 && ok == 6 && failed == 0,
         "invariant suites: " + std::to_string(ok) + "/6 property suites passed (120 random cases each)");
}

}  // namespace

int main() {
  std::cout.setf(std::ios::unitbuf);
  gradient_fidelity();
  determinism();
  solvability();
  orderings();
  semantic_degeneration();
  invariant_suites();
  return failures == 0 ? 0 : 1;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "tbrl/tbrl.hpp"

namespace fixtures {

using namespace tbrl;

inline std::filesystem::path data_dir() { return TBRL_DEFAULT_DATA_DIR; }

inline const engine::ConceptPool& pool() {
  static const engine::ConceptPool p = engine::load_concept_pool(data_dir() / "concepts.json");
  return p;
}

// Concept whose first in-distribution name is `name`.
inline const engine::Concept& concept_named(const std::string& name) {
  for (const auto& c : pool().concepts()) {
    if (c.surface_names_id.front() == name) return c;
  }
  throw Error("no concept named " + name);
}

// Fresh directory under the system temp dir, removed first if present.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tbrl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline engine::Difficulty random_difficulty(Rng& rng) {
  return static_cast<engine::Difficulty>(rng.below(3));
}

inline engine::GameSpec random_spec(Rng& rng) {
  const auto mode = rng.below(2) == 0 ? engine::VocabMode::id : engine::VocabMode::ood;
  return engine::generate_game(random_difficulty(rng), rng.next(), pool(), mode);
}

// State reached by up to max_walk uniformly random legal actions.
inline engine::GameState random_state(const engine::GameSpec& spec, Rng& rng, int max_walk = 30) {
  engine::GameState s = engine::initial_state(spec);
  const int walk = static_cast<int>(rng.below(static_cast<std::size_t>(max_walk) + 1));
  for (int i = 0; i < walk && !s.done; ++i) {
    const auto actions = engine::legal_actions(s, spec);
    engine::apply_action(s, spec, actions[rng.below(actions.size())]);
  }
  return s;
}

// A one-room kitchen: apple on a table, a closed fridge, goal apple -> fridge.
inline engine::GameSpec apple_fridge_spec() {
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

// ---------------------------------------------------------------------------
// Fact extraction straight from rendered text, one grammar per template set.
// ---------------------------------------------------------------------------

struct Facts {
  std::string room;
  std::map<std::string, std::string> furniture;  // name -> open | closed | supporter
  std::set<std::pair<std::string, std::string>> placements;  // (object, floor | in:f | on:f | carried)
  std::set<std::string> exits;

  bool operator==(const Facts&) const = default;
};

inline std::vector<std::string> split_list(const std::string& list) {
  static const std::regex sep(", | and ");
  static const std::regex article("^an? ");
  std::vector<std::string> out;
  for (std::sregex_token_iterator it(list.begin(), list.end(), sep, -1), end; it != end; ++it) {
    out.push_back(std::regex_replace(it->str(), article, ""));
  }
  return out;
}

inline Facts extract_facts(const std::string& text, int template_set) {
  Facts f;
  std::smatch m;
  auto each = [&](const std::regex& re, auto&& fn) {
    for (std::sregex_iterator it(text.begin(), text.end(), re), end; it != end; ++it) fn(*it);
  };
  auto place_all = [&](const std::string& list, const std::string& where) {
    for (const auto& o : split_list(list)) f.placements.insert({o, where});
  };
  if (template_set == 0) {
    if (std::regex_search(text, m, std::regex("You've entered an? (\\w+)\\."))) f.room = m[1];
    each(std::regex("You can see an? (open|closed) (\\w+)\\."),
         [&](const std::smatch& x) { f.furniture[x[2]] = x[1]; });
    each(std::regex("You see an? (\\w+)\\."), [&](const std::smatch& x) { f.furniture[x[1]] = "supporter"; });
    each(std::regex("In the (\\w+) you can make out ([^.]+)\\."),
         [&](const std::smatch& x) { place_all(x[2], "in:" + x[1].str()); });
    each(std::regex("On the (\\w+) you can make out ([^.]+)\\."), [&](const std::smatch& x) {
      place_all(x[2], x[1] == "floor" ? std::string("floor") : "on:" + x[1].str());
    });
    each(std::regex("There is an exit to the (east|west)\\."), [&](const std::smatch& x) { f.exits.insert(x[1]); });
    if (std::regex_search(text, m, std::regex("You are carrying ([^.]+)\\.")) && m[1] != "nothing") {
      place_all(m[1], "carried");
    }
  } else {
    if (std::regex_search(text, m, std::regex("This is the (\\w+)\\."))) f.room = m[1];
    each(std::regex("There is an? (\\w+) here, and it is (open|closed)\\."),
         [&](const std::smatch& x) { f.furniture[x[1]] = x[2]; });
    each(std::regex("There is an? (\\w+) here\\."), [&](const std::smatch& x) { f.furniture[x[1]] = "supporter"; });
    each(std::regex("Inside the (\\w+) there is ([^.]+)\\."),
         [&](const std::smatch& x) { place_all(x[2], "in:" + x[1].str()); });
    each(std::regex("Resting on the (\\w+) there is ([^.]+)\\."),
         [&](const std::smatch& x) { place_all(x[2], "on:" + x[1].str()); });
    each(std::regex("Lying on the floor there is ([^.]+)\\."), [&](const std::smatch& x) { place_all(x[1], "floor"); });
    each(std::regex("An exit leads (east|west)\\."), [&](const std::smatch& x) { f.exits.insert(x[1]); });
    if (std::regex_search(text, m, std::regex("In your hands there is ([^.]+)\\."))) place_all(m[1], "carried");
  }
  return f;
}

// The facts a correct rendering must state, computed from the state alone.
inline Facts expected_facts(const engine::GameState& s, const engine::GameSpec& g) {
  Facts f;
  f.room = g.rooms[static_cast<std::size_t>(s.current_room)];
  for (std::size_t i = 0; i < g.furniture.size(); ++i) {
    const auto& fu = g.furniture[i];
    if (fu.room != s.current_room) continue;
    f.furniture[fu.name] = fu.kind == engine::HolderKind::supporter ? "supporter" : (s.open_flags[i] ? "open" : "closed");
  }
  for (std::size_t o = 0; o < g.objects.size(); ++o) {
    const auto& loc = s.placements[o];
    const std::string& name = g.objects[o].name;
    if (loc.place == engine::Place::inventory) {
      f.placements.insert({name, "carried"});
    } else if (loc.place == engine::Place::floor) {
      if (loc.index == s.current_room) f.placements.insert({name, "floor"});
    } else {
      const auto& fu = g.furniture[static_cast<std::size_t>(loc.index)];
      if (fu.room == s.current_room && s.open_flags[static_cast<std::size_t>(loc.index)]) {
        f.placements.insert({name, (fu.kind == engine::HolderKind::container ? "in:" : "on:") + fu.name});
      }
    }
  }
  if (s.current_room > 0) f.exits.insert("west");
  if (s.current_room + 1 < static_cast<int>(g.rooms.size())) f.exits.insert("east");
  return f;
}

}  // namespace fixtures

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tbrl/engine/concepts.hpp"
#include "tbrl/errors.hpp"
#include "tbrl/rng.hpp"

namespace tbrl::engine {

enum class Difficulty { easy, medium, hard };
enum class VocabMode { id, ood };
enum class HolderKind { container, supporter };

inline std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::medium: return "medium";
    case Difficulty::hard: return "hard";
  }
  return "easy";
}

inline Difficulty parse_difficulty(std::string_view s) {
  if (s == "easy") return Difficulty::easy;
  if (s == "medium") return Difficulty::medium;
  if (s == "hard") return Difficulty::hard;
  throw ConfigError("unknown difficulty '" + std::string(s) + "'");
}

inline std::string_view to_string(VocabMode m) { return m == VocabMode::id ? "id" : "ood"; }

inline VocabMode parse_vocab_mode(std::string_view s) {
  if (s == "id") return VocabMode::id;
  if (s == "ood") return VocabMode::ood;
  throw ConfigError("unknown vocabulary mode '" + std::string(s) + "'");
}

// Object/target/room ranges per difficulty, plus how many furniture pieces are
// added beyond the goal destinations.
struct DifficultyProfile {
  int objects_min, objects_max;
  int targets_min, targets_max;
  int rooms_min, rooms_max;
  int extra_furniture;
};

inline DifficultyProfile profile_for(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return {1, 1, 1, 1, 1, 1, 1};
    case Difficulty::medium: return {2, 3, 1, 3, 1, 1, 2};
    case Difficulty::hard: return {6, 7, 5, 7, 1, 2, 2};
  }
  return {1, 1, 1, 1, 1, 1, 1};
}

enum class Place { floor, furniture, inventory };

// Where an object is. `index` is a room for floor, a furniture index for
// furniture and unused (0) for the inventory.
struct Location {
  Place place = Place::floor;
  int index = 0;

  static Location floor(int room) { return {Place::floor, room}; }
  static Location on(int furniture) { return {Place::furniture, furniture}; }
  static Location inventory() { return {Place::inventory, 0}; }

  bool operator==(const Location&) const = default;
  auto operator<=>(const Location&) const = default;
};

struct Furniture {
  std::string concept_id;
  std::string name;
  HolderKind kind = HolderKind::supporter;
  int room = 0;
  bool open = true;  // initial state; supporters are always open

  bool operator==(const Furniture&) const = default;
};

struct GameObject {
  std::string concept_id;
  std::string name;
  Location start;

  bool operator==(const GameObject&) const = default;
};

struct Goal {
  int object = 0;
  int destination = 0;

  bool operator==(const Goal&) const = default;
};

// Immutable description of one generated game. Rooms are laid out west to
// east in list order.
struct GameSpec {
  std::uint64_t seed = 0;
  Difficulty difficulty = Difficulty::easy;
  std::vector<std::string> rooms;
  std::vector<Furniture> furniture;
  std::vector<GameObject> objects;
  std::vector<Goal> goals;
  int max_steps = 50;
  int template_set_id = 0;

  int max_score() const { return static_cast<int>(goals.size()); }
  bool operator==(const GameSpec&) const = default;
};

// Mutable POMDP state. A goal counts as satisfied once an action places its
// object at the destination; it stays satisfied (and paid) for the episode.
struct GameState {
  int current_room = 0;
  std::vector<Location> placements;
  std::vector<bool> open_flags;
  std::vector<bool> goal_satisfied;
  int score = 0;
  int steps = 0;
  bool done = false;

  bool operator==(const GameState&) const = default;
};

struct Observation {
  std::string text;
  std::vector<std::string> admissible_actions;

  bool operator==(const Observation&) const = default;
};

enum class Verb { look, go, open, take, put };

// Structured action. `furniture` is -1 for taking from the floor; `room` is the
// destination of a go.
struct Action {
  Verb verb = Verb::look;
  int object = -1;
  int furniture = -1;
  int room = -1;

  bool operator==(const Action&) const = default;
  auto operator<=>(const Action&) const = default;
};

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace detail {

inline const std::string& pick_name(const std::vector<std::string>& names, double u) {
  const auto idx = std::min(names.size() - 1, static_cast<std::size_t>(u * names.size()));
  return names[idx];
}

}  // namespace detail

// Deterministic in (difficulty, seed, pool, mode). ID and OOD games built from
// the same arguments consume identical random draws, so they differ only in
// object surface names.
inline GameSpec generate_game(Difficulty difficulty, std::uint64_t seed, const ConceptPool& pool,
                              VocabMode mode) {
  const DifficultyProfile prof = profile_for(difficulty);
  Rng rng(combine_seeds(seed, static_cast<std::uint64_t>(difficulty) + 1));

  const int n_rooms = rng.between(prof.rooms_min, prof.rooms_max);
  const int n_objects = rng.between(prof.objects_min, prof.objects_max);
  const int n_targets = rng.between(prof.targets_min, std::min(prof.targets_max, n_objects));

  if (static_cast<int>(pool.rooms().size()) < n_rooms) {
    throw PoolExhausted("concept pool has too few rooms for a " + std::string(to_string(difficulty)) +
                        " game");
  }
  std::vector<const Concept*> objects = pool.objects();
  if (static_cast<int>(objects.size()) < n_objects) {
    throw PoolExhausted("concept pool has too few objects for a " +
                        std::string(to_string(difficulty)) + " game");
  }
  std::vector<std::string> rooms = pool.rooms();
  rng.shuffle(rooms);
  rooms.resize(static_cast<std::size_t>(n_rooms));
  rng.shuffle(objects);
  objects.resize(static_cast<std::size_t>(n_objects));

  std::vector<const Concept*> furniture;
  for (const Concept* o : objects) {
    const Concept* dest = &pool.at(o->goal_location);
    if (std::find(furniture.begin(), furniture.end(), dest) == furniture.end()) {
      furniture.push_back(dest);
    }
  }
  std::vector<const Concept*> spare;
  for (const Concept* f : pool.furniture()) {
    if (std::find(furniture.begin(), furniture.end(), f) == furniture.end()) spare.push_back(f);
  }
  if (static_cast<int>(spare.size()) < prof.extra_furniture) {
    throw PoolExhausted("concept pool has too little furniture for a " +
                        std::string(to_string(difficulty)) + " game");
  }
  rng.shuffle(spare);
  furniture.insert(furniture.end(), spare.begin(), spare.begin() + prof.extra_furniture);
  rng.shuffle(furniture);

  GameSpec spec;
  spec.seed = seed;
  spec.difficulty = difficulty;
  spec.rooms = rooms;
  for (std::size_t i = 0; i < furniture.size(); ++i) {
    const Concept& c = *furniture[i];
    Furniture f;
    f.concept_id = c.id;
    f.name = detail::pick_name(c.surface_names_id, rng.uniform());
    f.kind = c.kind == ConceptKind::container ? HolderKind::container : HolderKind::supporter;
    f.room = static_cast<int>(i % rooms.size());
    const double u = rng.uniform();
    f.open = f.kind == HolderKind::supporter || u >= 0.7;
    spec.furniture.push_back(std::move(f));
  }
  auto furniture_index = [&](const std::string& concept_id) {
    for (std::size_t i = 0; i < spec.furniture.size(); ++i) {
      if (spec.furniture[i].concept_id == concept_id) return static_cast<int>(i);
    }
    return -1;
  };

  for (int i = 0; i < n_objects; ++i) {
    const Concept& c = *objects[static_cast<std::size_t>(i)];
    GameObject o;
    o.concept_id = c.id;
    const double u = rng.uniform();
    o.name = detail::pick_name(mode == VocabMode::id ? c.surface_names_id : c.surface_names_ood, u);
    const int dest = furniture_index(c.goal_location);
    if (i < n_targets) {
      std::vector<Location> starts;
      for (int r = 0; r < n_rooms; ++r) starts.push_back(Location::floor(r));
      for (int f = 0; f < static_cast<int>(spec.furniture.size()); ++f) {
        if (f != dest) starts.push_back(Location::on(f));
      }
      o.start = starts[rng.below(starts.size())];
      spec.goals.push_back({i, dest});
    } else {
      o.start = Location::on(dest);
    }
    spec.objects.push_back(std::move(o));
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Serialization. Field order follows the struct; dump -> parse -> dump is
// byte-stable.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string placement_string(const GameSpec& spec, const Location& loc) {
  switch (loc.place) {
    case Place::floor: return "floor:" + spec.rooms.at(static_cast<std::size_t>(loc.index));
    case Place::furniture:
      return "furniture:" + spec.furniture.at(static_cast<std::size_t>(loc.index)).name;
    case Place::inventory: return "inventory";
  }
  return "inventory";
}

template <class Named>
int index_by_name(const std::vector<Named>& items, const std::string& name, const char* what) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].name == name) return static_cast<int>(i);
  }
  throw ParseError(std::string("unknown ") + what + " '" + name + "'", 0);
}

inline int room_index(const GameSpec& spec, const std::string& name) {
  for (std::size_t i = 0; i < spec.rooms.size(); ++i) {
    if (spec.rooms[i] == name) return static_cast<int>(i);
  }
  throw ParseError("unknown room '" + name + "'", 0);
}

inline Location parse_placement(const GameSpec& spec, const std::string& s) {
  if (s == "inventory") return Location::inventory();
  if (s.rfind("floor:", 0) == 0) return Location::floor(room_index(spec, s.substr(6)));
  if (s.rfind("furniture:", 0) == 0) {
    return Location::on(index_by_name(spec.furniture, s.substr(10), "furniture"));
  }
  throw ParseError("bad placement '" + s + "'", 0);
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const GameSpec& spec) {
  nlohmann::ordered_json j;
  j["seed"] = spec.seed;
  j["difficulty"] = std::string(to_string(spec.difficulty));
  j["rooms"] = spec.rooms;
  j["furniture"] = nlohmann::ordered_json::array();
  for (const Furniture& f : spec.furniture) {
    nlohmann::ordered_json item;
    item["concept"] = f.concept_id;
    item["name"] = f.name;
    item["kind"] = f.kind == HolderKind::container ? "container" : "supporter";
    item["room"] = spec.rooms.at(static_cast<std::size_t>(f.room));
    item["open"] = f.open;
    j["furniture"].push_back(std::move(item));
  }
  j["objects"] = nlohmann::ordered_json::array();
  for (const GameObject& o : spec.objects) {
    nlohmann::ordered_json item;
    item["concept"] = o.concept_id;
    item["name"] = o.name;
    item["placement"] = detail::placement_string(spec, o.start);
    j["objects"].push_back(std::move(item));
  }
  j["goals"] = nlohmann::ordered_json::array();
  for (const Goal& g : spec.goals) {
    nlohmann::ordered_json item;
    item["object"] = spec.objects.at(static_cast<std::size_t>(g.object)).name;
    item["destination"] = spec.furniture.at(static_cast<std::size_t>(g.destination)).name;
    j["goals"].push_back(std::move(item));
  }
  j["max_steps"] = spec.max_steps;
  j["template_set_id"] = spec.template_set_id;
  return j;
}

inline GameSpec game_spec_from_json(const nlohmann::json& j) {
  try {
    GameSpec spec;
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
    spec.rooms = j.at("rooms").get<std::vector<std::string>>();
    for (const auto& item : j.at("furniture")) {
      Furniture f;
      f.concept_id = item.at("concept").get<std::string>();
      f.name = item.at("name").get<std::string>();
      const std::string kind = item.at("kind").get<std::string>();
      if (kind != "container" && kind != "supporter") throw ParseError("bad kind " + kind, 0);
      f.kind = kind == "container" ? HolderKind::container : HolderKind::supporter;
      f.room = detail::room_index(spec, item.at("room").get<std::string>());
      f.open = item.at("open").get<bool>();
      spec.furniture.push_back(std::move(f));
    }
    for (const auto& item : j.at("objects")) {
      GameObject o;
      o.concept_id = item.at("concept").get<std::string>();
      o.name = item.at("name").get<std::string>();
      o.start = detail::parse_placement(spec, item.at("placement").get<std::string>());
      spec.objects.push_back(std::move(o));
    }
    for (const auto& item : j.at("goals")) {
      Goal g;
      g.object = detail::index_by_name(spec.objects, item.at("object").get<std::string>(), "object");
      g.destination = detail::index_by_name(spec.furniture,
                                            item.at("destination").get<std::string>(), "furniture");
      spec.goals.push_back(g);
    }
    spec.max_steps = j.at("max_steps").get<int>();
    spec.template_set_id = j.at("template_set_id").get<int>();
    if (spec.max_steps <= 0) throw ParseError("max_steps must be positive", 0);
    if (spec.rooms.empty()) throw ParseError("a game needs at least one room", 0);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("game spec: ") + e.what(), 0);
  }
}

inline std::string dump_game_spec(const GameSpec& spec) { return to_json(spec).dump(2) + "\n"; }

inline GameSpec parse_game_spec(std::string_view text) {
  try {
    return game_spec_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("game spec: ") + e.what(), 0);
  }
}

inline void save_game_spec(const GameSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << dump_game_spec(spec);
}

inline GameSpec load_game_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_game_spec(ss.str());
}

// score / max_score for scores in [0, max_score].
inline double normalized_score(int score, int max_score) {
  if (max_score <= 0) throw DomainError("normalized_score needs max_score >= 1");
  if (score < 0 || score > max_score) throw DomainError("score outside [0, max_score]");
  return static_cast<double>(score) / static_cast<double>(max_score);
}

}  // namespace tbrl::engine

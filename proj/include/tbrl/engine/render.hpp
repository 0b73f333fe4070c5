#pragma once

#include <string>
#include <vector>

#include "tbrl/engine/game.hpp"

namespace tbrl::engine {

inline constexpr int kTemplateSetCount = 2;

inline int template_set_count() { return kTemplateSetCount; }

inline void require_template_set(int set) {
  if (set < 0 || set >= kTemplateSetCount) {
    throw UnknownTemplateSet("unknown template set " + std::to_string(set));
  }
}

namespace detail {

inline std::string with_article(const std::string& noun) {
  const char c = noun.empty() ? 'x' : noun.front();
  const bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  return (vowel ? "an " : "a ") + noun;
}

inline std::string join_items(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += with_article(items[i]);
  }
  return out;
}

inline std::string direction(int from_room, int to_room) { return to_room > from_room ? "east" : "west"; }

struct Scene {
  std::vector<int> furniture;                  // in the current room, spec order
  std::vector<std::vector<std::string>> held;  // visible contents per furniture index
  std::vector<std::string> on_floor;
  std::vector<std::string> carried;
  std::vector<int> exits;
};

inline Scene visible_scene(const GameState& state, const GameSpec& spec) {
  Scene s;
  s.held.resize(spec.furniture.size());
  for (std::size_t f = 0; f < spec.furniture.size(); ++f) {
    if (spec.furniture[f].room == state.current_room) s.furniture.push_back(static_cast<int>(f));
  }
  for (std::size_t o = 0; o < spec.objects.size(); ++o) {
    const Location& loc = state.placements[o];
    const std::string& name = spec.objects[o].name;
    switch (loc.place) {
      case Place::inventory: s.carried.push_back(name); break;
      case Place::floor:
        if (loc.index == state.current_room) s.on_floor.push_back(name);
        break;
      case Place::furniture: {
        const auto f = static_cast<std::size_t>(loc.index);
        if (spec.furniture[f].room == state.current_room && state.open_flags[f]) {
          s.held[f].push_back(name);
        }
        break;
      }
    }
  }
  for (int r = 0; r < static_cast<int>(spec.rooms.size()); ++r) {
    if (r == state.current_room - 1 || r == state.current_room + 1) s.exits.push_back(r);
  }
  return s;
}

inline std::string render_set0(const GameState& state, const GameSpec& spec, const Scene& s) {
  std::vector<std::string> lines;
  lines.push_back("You've entered " +
                  with_article(spec.rooms[static_cast<std::size_t>(state.current_room)]) + ".");
  for (int fi : s.furniture) {
    const Furniture& f = spec.furniture[static_cast<std::size_t>(fi)];
    const auto& contents = s.held[static_cast<std::size_t>(fi)];
    if (f.kind == HolderKind::container) {
      const bool open = state.open_flags[static_cast<std::size_t>(fi)];
      lines.push_back(std::string("You can see ") + (open ? "an open " : "a closed ") + f.name + ".");
      if (open && !contents.empty()) {
        lines.push_back("In the " + f.name + " you can make out " + join_items(contents) + ".");
      }
    } else {
      lines.push_back("You see " + with_article(f.name) + ".");
      if (!contents.empty()) {
        lines.push_back("On the " + f.name + " you can make out " + join_items(contents) + ".");
      }
    }
  }
  if (!s.on_floor.empty()) lines.push_back("On the floor you can make out " + join_items(s.on_floor) + ".");
  for (int r : s.exits) lines.push_back("There is an exit to the " + direction(state.current_room, r) + ".");
  lines.push_back(s.carried.empty() ? "You are carrying nothing."
                                    : "You are carrying " + join_items(s.carried) + ".");
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? " " : "") + lines[i];
  return out;
}

inline std::string render_set1(const GameState& state, const GameSpec& spec, const Scene& s) {
  std::vector<std::string> lines;
  lines.push_back("This is the " + spec.rooms[static_cast<std::size_t>(state.current_room)] + ".");
  for (int fi : s.furniture) {
    const Furniture& f = spec.furniture[static_cast<std::size_t>(fi)];
    const auto& contents = s.held[static_cast<std::size_t>(fi)];
    if (f.kind == HolderKind::container) {
      const bool open = state.open_flags[static_cast<std::size_t>(fi)];
      lines.push_back("There is " + with_article(f.name) + " here, and it is " +
                      (open ? "open." : "closed."));
      if (open && !contents.empty()) {
        lines.push_back("Inside the " + f.name + " there is " + join_items(contents) + ".");
      }
    } else {
      lines.push_back("There is " + with_article(f.name) + " here.");
      if (!contents.empty()) {
        lines.push_back("Resting on the " + f.name + " there is " + join_items(contents) + ".");
      }
    }
  }
  if (!s.on_floor.empty()) lines.push_back("Lying on the floor there is " + join_items(s.on_floor) + ".");
  for (int r : s.exits) lines.push_back("An exit leads " + direction(state.current_room, r) + ".");
  lines.push_back(s.carried.empty() ? "Your hands are empty."
                                    : "In your hands there is " + join_items(s.carried) + ".");
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? " " : "") + lines[i];
  return out;
}

}  // namespace detail

// Describes the current room: furniture with open/closed status, visible
// objects, exits and inventory. Template sets state identical facts.
inline std::string render_observation(const GameState& state, const GameSpec& spec, int template_set_id) {
  require_template_set(template_set_id);
  const detail::Scene scene = detail::visible_scene(state, spec);
  return template_set_id == 0 ? detail::render_set0(state, spec, scene)
                              : detail::render_set1(state, spec, scene);
}

// Action phrasing. Set 0 is the engine's canonical grammar.
inline std::string describe_action(const Action& a, const GameState& state, const GameSpec& spec,
                                   int template_set_id = 0) {
  require_template_set(template_set_id);
  const bool alt = template_set_id == 1;
  auto object = [&] { return spec.objects.at(static_cast<std::size_t>(a.object)).name; };
  auto holder = [&] { return spec.furniture.at(static_cast<std::size_t>(a.furniture)); };
  switch (a.verb) {
    case Verb::look: return alt ? "look around" : "look";
    case Verb::go: return std::string(alt ? "walk " : "go ") + detail::direction(state.current_room, a.room);
    case Verb::open: return (alt ? "open the " : "open ") + holder().name;
    case Verb::take:
      if (a.furniture < 0) return (alt ? "pick up " : "take ") + object();
      return (alt ? "pick up " : "take ") + object() + " from " + holder().name;
    case Verb::put: {
      const Furniture& f = holder();
      const bool in = f.kind == HolderKind::container;
      if (alt) return "place " + object() + (in ? " inside " : " onto ") + f.name;
      return "put " + object() + (in ? " in " : " on ") + f.name;
    }
  }
  return "look";
}

}  // namespace tbrl::engine

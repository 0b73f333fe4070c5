#pragma once

#include <set>
#include <string>
#include <string_view>

namespace tbrl::engine {

// Every word the observation templates and action phrasings can emit, apart
// from room, furniture and object names. Kept in sync with render.hpp by a
// property test that renders random states.
inline const std::set<std::string>& template_vocabulary() {
  static const std::set<std::string> words = {
      // template set 0
      "you", "ve", "entered", "a", "an", "can", "see", "closed", "open", "in", "the", "make",
      "out", "on", "floor", "there", "is", "exit", "to", "east", "west", "are", "carrying",
      "nothing", "and",
      // template set 1
      "this", "here", "it", "inside", "resting", "lying", "leads", "your", "hands", "empty",
      // actions, both phrasings
      "look", "go", "take", "from", "put", "around", "walk", "pick", "up", "place", "onto"};
  return words;
}

inline bool is_name_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (!ok) return false;
  }
  return true;
}

}  // namespace tbrl::engine

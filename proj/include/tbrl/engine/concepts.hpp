#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tbrl/engine/vocabulary.hpp"
#include "tbrl/errors.hpp"

namespace tbrl::engine {

enum class ConceptKind { object, container, supporter };

inline std::string_view to_string(ConceptKind k) {
  switch (k) {
    case ConceptKind::object: return "object";
    case ConceptKind::container: return "container";
    case ConceptKind::supporter: return "supporter";
  }
  return "object";
}

inline ConceptKind parse_concept_kind(std::string_view s) {
  if (s == "object") return ConceptKind::object;
  if (s == "container") return ConceptKind::container;
  if (s == "supporter") return ConceptKind::supporter;
  throw ConfigError("unknown concept kind '" + std::string(s) + "'");
}

// One household concept with its in-distribution and held-out surface names.
// Objects carry the furniture concept they belong in; furniture leaves
// goal_location empty.
struct Concept {
  std::string id;
  ConceptKind kind = ConceptKind::object;
  std::vector<std::string> surface_names_id;
  std::vector<std::string> surface_names_ood;
  std::string goal_location;

  bool is_furniture() const { return kind != ConceptKind::object; }
  bool operator==(const Concept&) const = default;
};

class ConceptPool {
 public:
  ConceptPool() = default;
  ConceptPool(std::vector<std::string> rooms, std::vector<Concept> concepts)
      : rooms_(std::move(rooms)), concepts_(std::move(concepts)) {
    validate();
  }

  const std::vector<std::string>& rooms() const { return rooms_; }
  const std::vector<Concept>& concepts() const { return concepts_; }

  const Concept* find(std::string_view id) const {
    for (const Concept& c : concepts_) {
      if (c.id == id) return &c;
    }
    return nullptr;
  }

  const Concept& at(std::string_view id) const {
    const Concept* c = find(id);
    if (c == nullptr) throw ConfigError("unknown concept '" + std::string(id) + "'");
    return *c;
  }

  std::vector<const Concept*> objects() const { return filter(false); }
  std::vector<const Concept*> furniture() const { return filter(true); }

  // Same rooms and furniture, objects limited to `object_ids`.
  // Sub-pool of the given concept ids and room names.
  ConceptPool restricted_to(const std::set<std::string>& concept_ids, const std::set<std::string>& room_names) const {
    std::vector<Concept> kept;
    for (const Concept& c : concepts_) {
      if (concept_ids.count(c.id) > 0) kept.push_back(c);
    }
    std::vector<std::string> rooms;
    for (const std::string& r : rooms_) {
      if (room_names.count(r) > 0) rooms.push_back(r);
    }
    return ConceptPool(std::move(rooms), std::move(kept));
  }

  bool operator==(const ConceptPool&) const = default;

 private:
  std::vector<const Concept*> filter(bool furniture) const {
    std::vector<const Concept*> out;
    for (const Concept& c : concepts_) {
      if (c.is_furniture() == furniture) out.push_back(&c);
    }
    return out;
  }

  void validate() const {
    std::set<std::string> ids;
    std::set<std::string> names;
    auto claim_name = [&](const std::string& n, const std::string& owner) {
      if (!is_name_token(n)) {
        throw ConfigError("surface name '" + n + "' of " + owner + " must be one lowercase token");
      }
      if (template_vocabulary().count(n) > 0) {
        throw ConfigError("surface name '" + n + "' collides with a template word");
      }
      if (!names.insert(n).second) throw ConfigError("surface name '" + n + "' is used twice");
    };
    for (const std::string& r : rooms_) claim_name(r, "room");
    for (const Concept& c : concepts_) {
      if (!ids.insert(c.id).second) throw ConfigError("duplicate concept id '" + c.id + "'");
      if (c.surface_names_id.empty() || c.surface_names_ood.empty()) {
        throw ConfigError("concept '" + c.id + "' needs both ID and OOD surface names");
      }
      for (const std::string& n : c.surface_names_id) claim_name(n, c.id);
      for (const std::string& n : c.surface_names_ood) claim_name(n, c.id);
    }
    for (const Concept& c : concepts_) {
      if (c.is_furniture()) {
        if (!c.goal_location.empty()) {
          throw ConfigError("furniture concept '" + c.id + "' cannot have a goal location");
        }
        continue;
      }
      const auto it = std::find_if(concepts_.begin(), concepts_.end(),
                                   [&](const Concept& f) { return f.id == c.goal_location; });
      if (it == concepts_.end() || !it->is_furniture()) {
        throw ConfigError("goal location of '" + c.id + "' is not a container or supporter");
      }
    }
  }

  std::vector<std::string> rooms_;
  std::vector<Concept> concepts_;
};

inline ConceptPool concept_pool_from_json(const nlohmann::json& j) {
  try {
    std::vector<std::string> rooms = j.at("rooms").get<std::vector<std::string>>();
    std::vector<Concept> concepts;
    for (const auto& item : j.at("concepts")) {
      Concept c;
      c.id = item.at("id").get<std::string>();
      c.kind = parse_concept_kind(item.at("kind").get<std::string>());
      c.surface_names_id = item.at("surface_names_id").get<std::vector<std::string>>();
      c.surface_names_ood = item.at("surface_names_ood").get<std::vector<std::string>>();
      c.goal_location = item.value("goal_location", std::string());
      concepts.push_back(std::move(c));
    }
    return ConceptPool(std::move(rooms), std::move(concepts));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("concept pool: ") + e.what(), 0);
  }
}

inline nlohmann::ordered_json to_json(const ConceptPool& pool) {
  nlohmann::ordered_json j;
  j["rooms"] = pool.rooms();
  j["concepts"] = nlohmann::ordered_json::array();
  for (const Concept& c : pool.concepts()) {
    nlohmann::ordered_json item;
    item["id"] = c.id;
    item["kind"] = std::string(to_string(c.kind));
    item["surface_names_id"] = c.surface_names_id;
    item["surface_names_ood"] = c.surface_names_ood;
    if (!c.goal_location.empty()) item["goal_location"] = c.goal_location;
    j["concepts"].push_back(std::move(item));
  }
  return j;
}

inline ConceptPool load_concept_pool(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open concept pool " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("concept pool " + path.string() + ": " + e.what(), 0);
  }
  return concept_pool_from_json(j);
}

}  // namespace tbrl::engine

#pragma once

#include <string>

#include <json.hpp>

#include "apmdp/error.hpp"
#include "apmdp/planner.hpp"
#include "apmdp/world.hpp"

namespace apmdp {

inline nlohmann::json cell_json(const Cell& c) { return nlohmann::json::array({c.x, c.y, c.z}); }

inline nlohmann::json plan_to_json(const Plan& p, const WorldModel& world) {
  nlohmann::json j;
  j["world"] = p.world_id;
  j["formula"] = p.formula;
  j["method"] = p.method;
  j["start"] = cell_json(p.start);
  j["path"] = p.automaton_path;
  j["automaton_states"] = p.automaton_size;
  auto& hops = j["hops"] = nlohmann::json::array();
  for (const auto& h : p.hops) {
    nlohmann::json jh{{"from", h.from}, {"to", h.to}, {"level", h.level}, {"actions", h.actions},
                      {"backups", h.backups}, {"fallback", h.fallback}};
    auto& ab = jh["abstract"] = nlohmann::json::array();
    for (const auto& s : h.abstract_plan) ab.push_back(world.state_name(s));
    hops.push_back(std::move(jh));
  }
  auto& actions = j["actions"] = nlohmann::json::array();
  for (auto m : p.actions) actions.push_back(move_name(m));
  auto& states = j["states"] = nlohmann::json::array();
  for (const auto& c : p.states) states.push_back(cell_json(c));
  j["backups"] = p.backups;
  j["timings"] = {{"translate", p.translate_seconds}, {"plan", p.plan_seconds}, {"total", p.total_seconds()}};
  auto& attempts = j["attempts"] = nlohmann::json::array();
  for (const auto& a : p.attempts)
    attempts.push_back({{"path", a.states}, {"feasible", a.feasible}, {"actions", a.actions},
                        {"backups", a.backups}, {"reason", a.reason}});
  return j;
}

/// Reads a plan file. The state sequence is recomputed from the start cell
/// and the action list; stored states are ignored.
inline Plan plan_from_json(const nlohmann::json& j, const WorldModel& world) {
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("plan: missing key '") + key + "'");
    return j.at(key);
  };
  Plan p;
  try {
    p.world_id = need("world").get<std::string>();
    p.formula = need("formula").get<std::string>();
    p.method = j.value("method", std::string{});
    const auto& s = need("start");
    if (!s.is_array() || s.size() != 3) throw ConfigError("plan /start: expected [x, y, z]");
    p.start = {s[0].get<int>(), s[1].get<int>(), s[2].get<int>()};
    if (!world.contains(p.start)) throw ConfigError("plan /start: outside the world");
    p.states.push_back(p.start);
    const auto& acts = need("actions");
    if (!acts.is_array()) throw ConfigError("plan /actions: expected an array");
    for (std::size_t i = 0; i < acts.size(); ++i) {
      const auto m = parse_move(acts[i].get<std::string>());
      if (!m) throw ConfigError("plan /actions/" + std::to_string(i) + ": unknown action");
      const Cell next = apply(p.states.back(), *m);
      if (!world.contains(next)) throw ConfigError("plan /actions/" + std::to_string(i) + ": leaves the world");
      p.actions.push_back(*m);
      p.states.push_back(next);
    }
    if (j.contains("backups")) p.backups = j["backups"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  return p;
}

}  // namespace apmdp

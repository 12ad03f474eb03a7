#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "apmdp/error.hpp"
#include "apmdp/world.hpp"

namespace apmdp {

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& at) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(at + ": missing key '" + key + "'");
  return obj.at(key);
}

inline int require_int(const nlohmann::json& v, const std::string& at) {
  if (!v.is_number_integer()) throw ConfigError(at + ": expected an integer");
  return v.get<int>();
}

inline std::pair<int, int> require_range(const nlohmann::json& v, const std::string& at) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(at + ": expected [lo, hi]");
  return {require_int(v[0], at + "/0"), require_int(v[1], at + "/1")};
}

inline Cell require_cell(const nlohmann::json& v, const std::string& at) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(at + ": expected [x, y, z]");
  return {require_int(v[0], at + "/0"), require_int(v[1], at + "/1"), require_int(v[2], at + "/2")};
}

}  // namespace detail

/// World file (JSON):
///   { "id": "e1", "dims": [nx, ny, nz],
///     "starts": {"default": [x, y, z], ...},          (optional, ordered)
///     "rooms": [{"id": 0, "color": "red", "floor": 0, "x": [x0, x1], "y": [y0, y1]}, ...],
///     "landmarks": [{"name": "landmark_1", "cell": [x, y, z]}, ...] }
/// Floors and z coordinates are 0-based; floor propositions are 1-based.
inline WorldModel world_from_json(const nlohmann::json& doc) {
  using detail::require;
  if (!doc.is_object()) throw ConfigError("/: expected an object");
  const auto& id = require(doc, "id", "");
  if (!id.is_string()) throw ConfigError("/id: expected a string");
  const auto& dims = require(doc, "dims", "");
  const Cell d = detail::require_cell(dims, "/dims");

  std::vector<Room> rooms;
  const auto& jrooms = require(doc, "rooms", "");
  if (!jrooms.is_array()) throw ConfigError("/rooms: expected an array");
  for (std::size_t i = 0; i < jrooms.size(); ++i) {
    const auto at = "/rooms/" + std::to_string(i);
    const auto& jr = jrooms[i];
    Room r;
    const int rid = detail::require_int(require(jr, "id", at), at + "/id");
    if (rid < 0) throw ConfigError(at + "/id: negative room id");
    r.id = static_cast<std::size_t>(rid);
    if (jr.contains("color")) {
      if (!jr["color"].is_string()) throw ConfigError(at + "/color: expected a string");
      r.color = jr["color"].get<std::string>();
    }
    r.floor = detail::require_int(require(jr, "floor", at), at + "/floor");
    std::tie(r.x0, r.x1) = detail::require_range(require(jr, "x", at), at + "/x");
    std::tie(r.y0, r.y1) = detail::require_range(require(jr, "y", at), at + "/y");
    rooms.push_back(std::move(r));
  }

  std::vector<Landmark> landmarks;
  if (doc.contains("landmarks")) {
    const auto& jl = doc["landmarks"];
    if (!jl.is_array()) throw ConfigError("/landmarks: expected an array");
    for (std::size_t i = 0; i < jl.size(); ++i) {
      const auto at = "/landmarks/" + std::to_string(i);
      const auto& name = require(jl[i], "name", at);
      if (!name.is_string()) throw ConfigError(at + "/name: expected a string");
      landmarks.push_back({name.get<std::string>(), detail::require_cell(require(jl[i], "cell", at), at + "/cell")});
    }
  }

  std::vector<std::pair<std::string, Cell>> starts;
  if (doc.contains("starts")) {
    const auto& js = doc["starts"];
    if (!js.is_object()) throw ConfigError("/starts: expected an object");
    for (const auto& [name, cell] : js.items()) starts.emplace_back(name, detail::require_cell(cell, "/starts/" + name));
    // nlohmann sorts object keys; keep "default" first so it stays the default.
    std::stable_partition(starts.begin(), starts.end(), [](const auto& s) { return s.first == "default"; });
  }

  return WorldModel(id.get<std::string>(), d.x, d.y, d.z, std::move(rooms), std::move(landmarks), std::move(starts));
}

inline WorldModel parse_world(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("world file is not valid JSON: ") + e.what());
  }
  return world_from_json(doc);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline WorldModel load_world(const std::string& path) {
  try {
    return parse_world(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace apmdp

#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "apmdp/error.hpp"
#include "apmdp/facts.hpp"
#include "apmdp/ltl.hpp"

namespace apmdp {

struct Cell {
  int x = 0;
  int y = 0;
  int z = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

using ConcreteState = Cell;

inline std::string to_string(const Cell& c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + "," + std::to_string(c.z) + ")";
}

enum class Move : std::uint8_t { North, South, East, West, Up, Down };

inline constexpr std::array<Move, 6> kMoves{Move::North, Move::South, Move::East,
                                            Move::West,  Move::Up,    Move::Down};

inline const char* move_name(Move m) {
  static constexpr const char* names[] = {"north", "south", "east", "west", "up", "down"};
  return names[static_cast<int>(m)];
}

inline std::optional<Move> parse_move(std::string_view s) {
  for (auto m : kMoves)
    if (s == move_name(m)) return m;
  return std::nullopt;
}

inline Cell apply(Cell c, Move m) {
  switch (m) {
    case Move::North: ++c.y; break;
    case Move::South: --c.y; break;
    case Move::East: ++c.x; break;
    case Move::West: --c.x; break;
    case Move::Up: ++c.z; break;
    case Move::Down: --c.z; break;
  }
  return c;
}

/// A state of the hierarchy: a cell index at level 0, a room index at level 1,
/// a floor index at level 2.
struct AbstractState {
  int level = kCellLevel;
  std::size_t id = 0;

  friend auto operator<=>(const AbstractState&, const AbstractState&) = default;
};

/// Level 0: `code` is a Move. Level 1: target room. Level 2: target floor.
struct AbstractAction {
  int level = kCellLevel;
  std::size_t code = 0;

  friend auto operator<=>(const AbstractAction&, const AbstractAction&) = default;
};

struct Room {
  std::size_t id = 0;
  std::string color;  // may be empty
  int floor = 0;
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;  // inclusive bounds

  std::string prop_name() const { return color.empty() ? "room_" + std::to_string(id) : color + "_room"; }
  bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  std::size_t cell_count() const { return static_cast<std::size_t>(x1 - x0 + 1) * (y1 - y0 + 1); }
};

struct Landmark {
  std::string name;
  Cell cell;
};

/// 3D gridworld with floors (z layers) partitioned into rectangular rooms.
/// Propositions are registered floors first, then rooms, then landmarks, so
/// guards print with the coarser propositions first.
class WorldModel {
 public:
  WorldModel(std::string id, int nx, int ny, int nz, std::vector<Room> rooms, std::vector<Landmark> landmarks,
             std::vector<std::pair<std::string, Cell>> starts = {})
      : id_(std::move(id)), nx_(nx), ny_(ny), nz_(nz), rooms_(std::move(rooms)), landmarks_(std::move(landmarks)),
        starts_(std::move(starts)) {
    validate_and_index();
    build_props();
    build_adjacency();
  }

  const std::string& id() const noexcept { return id_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int nz() const noexcept { return nz_; }
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(nx_) * ny_ * nz_; }
  std::size_t floor_count() const noexcept { return static_cast<std::size_t>(nz_); }
  const std::vector<Room>& rooms() const noexcept { return rooms_; }
  const std::vector<Landmark>& landmarks() const noexcept { return landmarks_; }
  const PropRegistry& registry() const noexcept { return registry_; }
  const MutexFacts& facts() const noexcept { return facts_; }

  bool contains(const Cell& c) const noexcept {
    return c.x >= 0 && c.x < nx_ && c.y >= 0 && c.y < ny_ && c.z >= 0 && c.z < nz_;
  }
  std::size_t cell_index(const Cell& c) const {
    if (!contains(c)) throw ConfigError("cell " + to_string(c) + " is outside the world");
    return static_cast<std::size_t>(c.x) + static_cast<std::size_t>(nx_) * (c.y + static_cast<std::size_t>(ny_) * c.z);
  }
  Cell cell_at(std::size_t index) const {
    const auto plane = static_cast<std::size_t>(nx_) * ny_;
    return Cell{static_cast<int>(index % nx_), static_cast<int>(index / nx_ % ny_), static_cast<int>(index / plane)};
  }

  std::size_t room_of(const Cell& c) const { return room_of_cell_[cell_index(c)]; }

  /// Named start cells in file order; the first one is the default.
  const std::vector<std::pair<std::string, Cell>>& starts() const noexcept { return starts_; }
  std::optional<Cell> start(const std::string& name) const {
    for (const auto& [n, c] : starts_)
      if (n == name) return c;
    return std::nullopt;
  }
  Cell default_start() const { return starts_.empty() ? Cell{} : starts_.front().second; }

  PropId floor_prop(std::size_t floor) const { return floor_props_.at(floor); }
  PropId room_prop(std::size_t room) const { return room_props_.at(room); }
  std::optional<PropId> landmark_prop(const Cell& c) const {
    const auto l = landmark_at_[cell_index(c)];
    if (l < 0) return std::nullopt;
    return landmark_props_[static_cast<std::size_t>(l)];
  }

  std::size_t state_count(int level) const {
    switch (level) {
      case kCellLevel: return cell_count();
      case kRoomLevel: return rooms_.size();
      case kFloorLevel: return floor_count();
      default: throw Error(ErrorKind::Usage, "invalid level " + std::to_string(level));
    }
  }

  bool valid(const AbstractState& s) const {
    return s.level >= 0 && s.level < kLevelCount && s.id < state_count(s.level);
  }

  /// Propositions true in s, sorted by id. A level-l state says nothing about
  /// propositions below l.
  std::vector<PropId> label(const AbstractState& s) const {
    std::vector<PropId> out;
    switch (s.level) {
      case kCellLevel: {
        const Cell c = cell_at(s.id);
        out.push_back(floor_props_[static_cast<std::size_t>(c.z)]);
        out.push_back(room_props_[room_of_cell_[s.id]]);
        if (landmark_at_[s.id] >= 0) out.push_back(landmark_props_[static_cast<std::size_t>(landmark_at_[s.id])]);
        break;
      }
      case kRoomLevel:
        out.push_back(floor_props_[static_cast<std::size_t>(rooms_.at(s.id).floor)]);
        out.push_back(room_props_[s.id]);
        break;
      case kFloorLevel: out.push_back(floor_props_.at(s.id)); break;
      default: throw Error(ErrorKind::Usage, "invalid level");
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<PropId> label(const Cell& c) const { return label(AbstractState{kCellLevel, cell_index(c)}); }

  AbstractState project(const Cell& c, int level) const {
    const auto idx = cell_index(c);
    switch (level) {
      case kCellLevel: return {kCellLevel, idx};
      case kRoomLevel: return {kRoomLevel, room_of_cell_[idx]};
      case kFloorLevel: return {kFloorLevel, static_cast<std::size_t>(c.z)};
      default: throw Error(ErrorKind::Usage, "invalid level " + std::to_string(level));
    }
  }

  /// Lifts an abstract state to a coarser (or the same) level.
  AbstractState project(const AbstractState& s, int level) const {
    if (level < s.level) throw Error(ErrorKind::Usage, "cannot project to a finer level");
    if (level == s.level) return s;
    if (s.level == kCellLevel) return project(cell_at(s.id), level);
    return {kFloorLevel, static_cast<std::size_t>(rooms_.at(s.id).floor)};
  }

  /// Successors in fixed action order: primitive moves in kMoves order, rooms
  /// and floors by ascending index.
  std::vector<std::pair<AbstractAction, AbstractState>> neighbors(const AbstractState& s) const {
    std::vector<std::pair<AbstractAction, AbstractState>> out;
    switch (s.level) {
      case kCellLevel: {
        const Cell c = cell_at(s.id);
        for (auto m : kMoves) {
          const Cell n = apply(c, m);
          if (contains(n)) out.push_back({{kCellLevel, static_cast<std::size_t>(m)}, {kCellLevel, cell_index(n)}});
        }
        break;
      }
      case kRoomLevel:
        for (auto r : room_adjacency_.at(s.id)) out.push_back({{kRoomLevel, r}, {kRoomLevel, r}});
        break;
      case kFloorLevel:
        if (s.id > 0) out.push_back({{kFloorLevel, s.id - 1}, {kFloorLevel, s.id - 1}});
        if (s.id + 1 < floor_count()) out.push_back({{kFloorLevel, s.id + 1}, {kFloorLevel, s.id + 1}});
        break;
      default: throw Error(ErrorKind::Usage, "invalid level");
    }
    return out;
  }

  /// Cell indices inside an abstract state, ascending.
  std::vector<std::size_t> cells_of(const AbstractState& s) const {
    std::vector<std::size_t> out;
    switch (s.level) {
      case kCellLevel: out.push_back(s.id); break;
      case kRoomLevel: {
        const auto& r = rooms_.at(s.id);
        for (int y = r.y0; y <= r.y1; ++y)
          for (int x = r.x0; x <= r.x1; ++x) out.push_back(cell_index({x, y, r.floor}));
        std::sort(out.begin(), out.end());
        break;
      }
      case kFloorLevel:
        for (int y = 0; y < ny_; ++y)
          for (int x = 0; x < nx_; ++x) out.push_back(cell_index({x, y, static_cast<int>(s.id)}));
        break;
      default: throw Error(ErrorKind::Usage, "invalid level");
    }
    return out;
  }

  std::string state_name(const AbstractState& s) const {
    switch (s.level) {
      case kCellLevel: return to_string(cell_at(s.id));
      case kRoomLevel: return registry_[room_props_.at(s.id)].name;
      default: return registry_[floor_props_.at(s.id)].name;
    }
  }

  std::string action_name(const AbstractAction& a) const {
    switch (a.level) {
      case kCellLevel: return move_name(static_cast<Move>(a.code));
      case kRoomLevel: return "goto_" + registry_[room_props_.at(a.code)].name;
      default: return "goto_" + registry_[floor_props_.at(a.code)].name;
    }
  }

 private:
  void validate_and_index() {
    if (nx_ <= 0 || ny_ <= 0 || nz_ <= 0) throw ConfigError("/dims: every dimension must be positive");
    room_of_cell_.assign(cell_count(), kUnassigned);
    for (std::size_t i = 0; i < rooms_.size(); ++i) {
      const auto& r = rooms_[i];
      const std::string at = "/rooms/" + std::to_string(i);
      if (r.id != i) throw ConfigError(at + "/id: room ids must be 0..N-1 in file order, expected " + std::to_string(i));
      if (r.floor < 0 || r.floor >= nz_) throw ConfigError(at + "/floor: floor " + std::to_string(r.floor) + " out of range");
      if (r.x0 > r.x1 || r.x0 < 0 || r.x1 >= nx_) throw ConfigError(at + "/x: range outside the world or empty");
      if (r.y0 > r.y1 || r.y0 < 0 || r.y1 >= ny_) throw ConfigError(at + "/y: range outside the world or empty");
      for (int y = r.y0; y <= r.y1; ++y)
        for (int x = r.x0; x <= r.x1; ++x) {
          auto& slot = room_of_cell_[cell_index({x, y, r.floor})];
          if (slot != kUnassigned)
            throw ConfigError(at + ": cell " + to_string({x, y, r.floor}) + " already belongs to room " +
                              std::to_string(slot));
          slot = i;
        }
    }
    for (std::size_t c = 0; c < cell_count(); ++c)
      if (room_of_cell_[c] == kUnassigned)
        throw ConfigError("/rooms: cell " + to_string(cell_at(c)) + " belongs to no room");

    landmark_at_.assign(cell_count(), -1);
    for (std::size_t i = 0; i < landmarks_.size(); ++i) {
      const auto& l = landmarks_[i];
      const std::string at = "/landmarks/" + std::to_string(i);
      if (!contains(l.cell)) throw ConfigError(at + "/cell: " + to_string(l.cell) + " is outside the world");
      auto& slot = landmark_at_[cell_index(l.cell)];
      if (slot >= 0) throw ConfigError(at + "/cell: cell already holds landmark '" + landmarks_[slot].name + "'");
      slot = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < starts_.size(); ++i)
      if (!contains(starts_[i].second))
        throw ConfigError("/starts/" + starts_[i].first + ": " + to_string(starts_[i].second) +
                          " is outside the world");
  }

  void build_props() {
    auto add = [&](const std::string& name, int level, const std::string& at) {
      if (registry_.find(name)) throw ConfigError(at + ": proposition '" + name + "' is declared twice");
      try {
        return registry_.add(name, level);
      } catch (const ConfigError& e) {
        throw ConfigError(at + ": " + e.what());
      }
    };
    for (int f = 0; f < nz_; ++f) floor_props_.push_back(add("floor_" + std::to_string(f + 1), kFloorLevel, "/dims"));
    for (std::size_t i = 0; i < rooms_.size(); ++i)
      room_props_.push_back(add(rooms_[i].prop_name(), kRoomLevel, "/rooms/" + std::to_string(i) + "/color"));
    for (std::size_t i = 0; i < landmarks_.size(); ++i)
      landmark_props_.push_back(add(landmarks_[i].name, kCellLevel, "/landmarks/" + std::to_string(i) + "/name"));

    std::vector<MutexFacts::Group> groups{{floor_props_, true}, {room_props_, true}};
    if (!landmark_props_.empty()) groups.push_back({landmark_props_, false});
    std::vector<MutexFacts::Implication> implications;
    for (std::size_t r = 0; r < rooms_.size(); ++r)
      implications.push_back({room_props_[r], floor_props_[static_cast<std::size_t>(rooms_[r].floor)]});
    for (std::size_t i = 0; i < landmarks_.size(); ++i) {
      const auto c = landmarks_[i].cell;
      implications.push_back({landmark_props_[i], room_props_[room_of(c)]});
      implications.push_back({landmark_props_[i], floor_props_[static_cast<std::size_t>(c.z)]});
    }
    facts_ = MutexFacts(std::move(groups), std::move(implications));
  }

  void build_adjacency() {
    std::vector<std::set<std::size_t>> adj(rooms_.size());
    for (std::size_t i = 0; i < cell_count(); ++i) {
      const Cell c = cell_at(i);
      for (auto m : kMoves) {
        const Cell n = apply(c, m);
        if (!contains(n)) continue;
        const auto a = room_of_cell_[i], b = room_of(n);
        if (a != b) adj[a].insert(b);
      }
    }
    for (auto& s : adj) room_adjacency_.emplace_back(s.begin(), s.end());
  }

  static constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

  std::string id_;
  int nx_, ny_, nz_;
  std::vector<Room> rooms_;
  std::vector<Landmark> landmarks_;
  std::vector<std::pair<std::string, Cell>> starts_;
  std::vector<std::size_t> room_of_cell_;
  std::vector<int> landmark_at_;
  std::vector<std::vector<std::size_t>> room_adjacency_;
  PropRegistry registry_;
  std::vector<PropId> floor_props_, room_props_, landmark_props_;
  MutexFacts facts_;
};

}  // namespace apmdp

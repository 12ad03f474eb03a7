#pragma once

// Breadth-first search over (cell, automaton state) pairs. Grid moves are
// recomputed from the world dimensions rather than taken from the planner.

#include <algorithm>
#include <deque>
#include <optional>
#include <vector>

#include "apmdp/automaton.hpp"
#include "apmdp/world.hpp"

namespace oracle {

struct BfsResult {
  std::size_t length = 0;
  std::vector<apmdp::Cell> trace;
};

inline std::optional<apmdp::StateIndex> read(const apmdp::WorldModel& w, const apmdp::Dba& d, apmdp::StateIndex q,
                                             const apmdp::Cell& c) {
  const auto label = w.label(c);
  return d.step(q, [&](apmdp::PropId id) { return std::find(label.begin(), label.end(), id) != label.end(); });
}

/// Shortest trace from `start` whose automaton run ends accepting without
/// passing through a dead state; nullopt when none exists.
inline std::optional<BfsResult> shortest_accepting(const apmdp::WorldModel& w, const apmdp::Dba& d,
                                                   const apmdp::Cell& start) {
  const std::size_t nq = d.size();
  const int nx = w.nx(), ny = w.ny(), nz = w.nz();
  auto id = [&](const apmdp::Cell& c, apmdp::StateIndex q) {
    return ((static_cast<std::size_t>(c.z) * ny + c.y) * nx + c.x) * nq + q;
  };
  const auto q0 = read(w, d, d.initial(), start);
  if (!q0 || d.dead(*q0)) return std::nullopt;
  std::vector<long> parent(static_cast<std::size_t>(nx) * ny * nz * nq, -2);
  std::vector<apmdp::Cell> cell_of(parent.size());
  std::deque<std::pair<apmdp::Cell, apmdp::StateIndex>> queue{{start, *q0}};
  parent[id(start, *q0)] = -1;
  cell_of[id(start, *q0)] = start;
  const int dx[] = {0, 0, 1, -1, 0, 0}, dy[] = {1, -1, 0, 0, 0, 0}, dz[] = {0, 0, 0, 0, 1, -1};
  while (!queue.empty()) {
    auto [c, q] = queue.front();
    queue.pop_front();
    if (d.accepting(q)) {
      BfsResult r;
      for (long k = static_cast<long>(id(c, q)); k >= 0; k = parent[static_cast<std::size_t>(k)])
        r.trace.push_back(cell_of[static_cast<std::size_t>(k)]);
      std::reverse(r.trace.begin(), r.trace.end());
      r.length = r.trace.size() - 1;
      return r;
    }
    for (int k = 0; k < 6; ++k) {
      const apmdp::Cell n{c.x + dx[k], c.y + dy[k], c.z + dz[k]};
      if (n.x < 0 || n.y < 0 || n.z < 0 || n.x >= nx || n.y >= ny || n.z >= nz) continue;
      const auto q2 = read(w, d, q, n);
      if (!q2 || d.dead(*q2)) continue;
      const auto key = id(n, *q2);
      if (parent[key] != -2) continue;
      parent[key] = static_cast<long>(id(c, q));
      cell_of[key] = n;
      queue.push_back({n, *q2});
    }
  }
  return std::nullopt;
}

}  // namespace oracle

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "apmdp/automaton.hpp"
#include "apmdp/error.hpp"
#include "apmdp/ltl.hpp"
#include "apmdp/mdp.hpp"
#include "apmdp/product.hpp"
#include "apmdp/subproblem.hpp"
#include "apmdp/world.hpp"

namespace apmdp {

struct HopRecord {
  StateIndex from = 0;
  StateIndex to = 0;
  int level = kCellLevel;  // level the hop was finally solved at
  std::size_t actions = 0;
  std::size_t backups = 0;
  bool fallback = false;  // re-planned below its natural level
  std::vector<AbstractState> abstract_plan;
};

struct PathAttempt {
  std::vector<StateIndex> states;
  bool feasible = false;
  std::size_t actions = 0;
  std::size_t backups = 0;
  std::string reason;
};

struct Plan {
  std::string world_id;
  std::string formula;
  std::string method;
  Cell start;
  std::vector<Move> actions;
  std::vector<Cell> states;  // actions.size() + 1 cells, states[0] == start
  std::vector<StateIndex> automaton_path;
  std::vector<HopRecord> hops;
  std::vector<PathAttempt> attempts;
  std::size_t automaton_size = 0;
  std::size_t backups = 0;
  double translate_seconds = 0.0;
  double plan_seconds = 0.0;

  double total_seconds() const { return translate_seconds + plan_seconds; }
};

struct Translation {
  Formula formula = Formula::constant(true);
  Dba raw;
  Dba pruned;
  double seconds = 0.0;
};

inline Translation translate(const WorldModel& world, const Formula& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Translation t;
  t.formula = f;
  t.raw = ltl_to_dba(f);
  t.pruned = remove_contradictions(t.raw, world.facts());
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

// ---------------------------------------------------------------------------

struct CheckResult {
  bool satisfied = false;
  std::size_t step = 0;  // first offending state index when violated
  StateIndex final_state = 0;
  std::vector<StateIndex> run;  // automaton state after each plan state
  std::string reason;
};

/// Runs the automaton over the level-0 labels of `states`. The trace is
/// satisfied iff the run never enters a dead state and ends accepting.
inline CheckResult check_trace(const WorldModel& world, const Dba& dba, const std::vector<Cell>& states) {
  CheckResult r;
  StateIndex q = dba.initial();
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!world.contains(states[i])) {
      r.step = i;
      r.reason = "state " + to_string(states[i]) + " is outside the world";
      return r;
    }
    if (i > 0) {
      const auto a = states[i - 1], b = states[i];
      if (std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z) != 1) {
        r.step = i;
        r.reason = "states " + std::to_string(i - 1) + " and " + std::to_string(i) + " are not one move apart";
        return r;
      }
    }
    const auto label = world.label(states[i]);
    const auto next = dba.step(q, [&](PropId id) { return std::binary_search(label.begin(), label.end(), id); });
    if (!next) {
      r.step = i;
      r.reason = "label of " + to_string(states[i]) + " matches no automaton edge";
      return r;
    }
    q = *next;
    r.run.push_back(q);
    if (dba.dead(q)) {
      r.step = i;
      r.final_state = q;
      r.reason = "specification violated at step " + std::to_string(i) + " " + to_string(states[i]);
      return r;
    }
  }
  r.final_state = q;
  if (states.empty()) {
    r.reason = "empty trace";
    return r;
  }
  if (!dba.accepting(q)) {
    r.step = states.size() - 1;
    r.reason = "trace ends before the specification is satisfied";
    return r;
  }
  r.satisfied = true;
  return r;
}

inline CheckResult check_plan(const WorldModel& world, const Dba& pruned, const Plan& plan) {
  return check_trace(world, pruned, plan.states);
}

inline std::optional<Move> move_between(const Cell& a, const Cell& b) {
  for (auto m : kMoves)
    if (apply(a, m) == b) return m;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Grounding.

/// States one level below `region` that lie inside it, ascending.
inline std::vector<AbstractState> children_of(const WorldModel& world, const AbstractState& region) {
  std::vector<AbstractState> out;
  if (region.level == kRoomLevel) {
    for (auto c : world.cells_of(region)) out.push_back({kCellLevel, c});
  } else if (region.level == kFloorLevel) {
    for (const auto& r : world.rooms())
      if (static_cast<std::size_t>(r.floor) == region.id) out.push_back({kRoomLevel, r.id});
  } else {
    throw Error(ErrorKind::Usage, "level-0 states have no children");
  }
  return out;
}

struct GroundedSegment {
  std::vector<Cell> cells;  // cells entered, in order (excludes the start cell)
  std::size_t backups = 0;
  std::optional<std::size_t> stay_violation;  // index into cells
};

namespace detail {

// Moves from `cur` (inside a) into b, solving reach problems one level down
// inside a u b and recursing to level 0.
inline void ground_step(const WorldModel& world, const AbstractState& a, const AbstractState& b, Cell& cur,
                        GroundedSegment& out, const RewardParams& params) {
  const int lower = a.level - 1;
  auto states = children_of(world, a);
  auto more = children_of(world, b);
  states.insert(states.end(), more.begin(), more.end());
  std::sort(states.begin(), states.end());
  auto sp = build_reach_mdp(
      world, lower, std::move(states), [&](const AbstractState& s) { return world.project(s, a.level) == b; },
      [](const AbstractState&) { return true; }, params);
  const auto vi = value_iteration(sp.mdp, params);
  out.backups += vi.backups;
  Rollout roll;
  try {
    roll = extract_plan(sp.mdp, vi, sp.index_of(world.project(cur, lower)));
  } catch (const InfeasibleError& e) {
    throw GroundingError("cannot ground " + world.state_name(a) + " -> " + world.state_name(b) + ": " + e.what());
  }
  for (std::size_t i = 1; i < roll.states.size(); ++i) {
    const auto next = sp.states[roll.states[i]];
    if (lower == kCellLevel) {
      cur = world.cell_at(next.id);
      out.cells.push_back(cur);
    } else {
      ground_step(world, sp.states[roll.states[i - 1]], next, cur, out, params);
    }
  }
}

}  // namespace detail

/// Expands an abstract state sequence at level > 0 into primitive moves
/// starting from `start` (which must project onto abstract[0]). The stay
/// guard is re-evaluated on every grounded cell before the last one.
inline GroundedSegment ground_segment(const WorldModel& world, const std::vector<AbstractState>& abstract,
                                      const Formula& stay, const Cell& start, const RewardParams& params) {
  GroundedSegment out;
  if (abstract.empty()) return out;
  if (world.project(start, abstract.front().level) != abstract.front())
    throw GroundingError("start " + to_string(start) + " is not inside " + world.state_name(abstract.front()));
  Cell cur = start;
  for (std::size_t i = 0; i + 1 < abstract.size(); ++i) detail::ground_step(world, abstract[i], abstract[i + 1], cur, out, params);
  for (std::size_t i = 0; i + 1 < out.cells.size() && !out.stay_violation; ++i)
    if (!eval_guard(stay, world.label(out.cells[i]), kCellLevel)) out.stay_violation = i;
  return out;
}

// ---------------------------------------------------------------------------
// AP-MDP.

namespace detail {

struct HopResult {
  std::vector<Cell> cells;  // entered cells
  HopRecord record;
};

// Solves one hop at `level`. When `consumed` is set the start cell has
// already been read by the automaton, so the first move is chosen by one-step
// lookahead and the start region may itself satisfy the goal.
inline HopResult solve_hop_at(const WorldModel& world, const PathHop& hop, const Cell& start, bool consumed, int level,
                              const RewardParams& params) {
  HopResult res;
  res.record.from = hop.from;
  res.record.to = hop.to;
  res.record.level = level;

  std::vector<AbstractState> states;
  for (std::size_t i = 0; i < world.state_count(level); ++i) states.push_back({level, i});
  auto goal = [&](const AbstractState& s) { return eval_guard(hop.goal, world.label(s), level); };
  auto stay = [&](const AbstractState& s) { return eval_guard(hop.stay, world.label(s), level); };
  auto sp = build_reach_mdp(world, level, std::move(states), goal, stay, params);
  sp.goal = hop.goal;
  sp.stay = hop.stay;
  sp.initial = sp.index_of(world.project(start, level));
  bool any_goal = false;
  for (std::size_t i = 0; i < sp.mdp.size() && !any_goal; ++i) any_goal = sp.mdp.info(i).goal;
  if (!any_goal) throw InfeasibleError("no state satisfies goal '" + to_string(hop.goal) + "'");

  const auto vi = value_iteration(sp.mdp, params);
  res.record.backups += vi.backups;

  if (consumed && level > kCellLevel && sp.mdp.info(sp.initial).goal) {
    // Dwell: one primitive move that stays inside the start region.
    const auto region = world.project(start, level);
    for (auto m : kMoves) {
      const Cell n = apply(start, m);
      if (world.contains(n) && world.project(n, level) == region) {
        res.cells.push_back(n);
        res.record.abstract_plan = {region, region};
        res.record.actions = 1;
        return res;
      }
    }
  }

  std::vector<std::size_t> seq;
  if (consumed) {
    const auto a = greedy_action(sp.mdp, sp.initial, vi.values, params.discount);
    if (a == kNoAction) throw NoPlanError("start region has no moves");
    const auto next = sp.mdp.outcomes(sp.initial, a).front().next;
    seq.push_back(sp.initial);
    if (sp.mdp.info(next).terminal) {
      if (!sp.mdp.info(next).goal) throw NoPlanError("best first move violates the stay condition");
      seq.push_back(next);
    } else {
      const auto tail = extract_plan(sp.mdp, vi, next);
      seq.insert(seq.end(), tail.states.begin(), tail.states.end());
    }
  } else {
    seq = extract_plan(sp.mdp, vi, sp.initial).states;
  }

  for (auto i : seq) res.record.abstract_plan.push_back(sp.states[i]);
  if (level == kCellLevel) {
    for (std::size_t i = 1; i < seq.size(); ++i) res.cells.push_back(world.cell_at(sp.states[seq[i]].id));
  } else {
    auto g = ground_segment(world, res.record.abstract_plan, hop.stay, start, params);
    res.record.backups += g.backups;
    res.cells = std::move(g.cells);
  }
  res.record.actions = res.cells.size();
  return res;
}

// True iff reading `cells` from hop.from stays there until the last cell,
// which moves the automaton to hop.to.
inline bool segment_follows_hop(const WorldModel& world, const DbaWorldTable& table, const PathHop& hop,
                                const std::vector<Cell>& cells) {
  if (cells.empty()) return false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto q = table.next(hop.from, world.cell_index(cells[i]));
    if (q != (i + 1 == cells.size() ? hop.to : hop.from)) return false;
  }
  return true;
}

}  // namespace detail

/// Solves the automaton hops of one path in sequence. Returns the attempt
/// record and, when feasible, the cell trace and hop records.
inline PathAttempt solve_path(const WorldModel& world, const Dba& dba, const DbaWorldTable& table,
                              const AutomatonPath& path, const Cell& start, const RewardParams& params,
                              std::vector<Cell>* trace, std::vector<HopRecord>* hops) {
  PathAttempt att;
  att.states = path.states;
  std::vector<Cell> cells{start};
  std::vector<HopRecord> records;
  const auto c0 = world.cell_index(start);
  const auto q_after_start = table.next(dba.initial(), c0);

  if (path.hops.empty()) {
    if (q_after_start != dba.initial()) {
      att.reason = "start label leaves the initial automaton state";
      return att;
    }
  }
  try {
    for (std::size_t j = 0; j < path.hops.size(); ++j) {
      const auto& hop = path.hops[j];
      const Cell cur = cells.back();
      if (j == 0) {
        if (q_after_start == hop.to) {
          records.push_back({hop.from, hop.to, hop_level(hop.goal, hop.stay), 0, 0, false, {}});
          continue;
        }
        if (q_after_start != hop.from)
          throw InfeasibleError("start label violates the stay condition '" + to_string(hop.stay) + "'");
      }
      const bool consumed = j > 0;
      const int natural = hop_level(hop.goal, hop.stay);
      std::optional<detail::HopResult> done;
      std::size_t spent = 0;
      for (int level = natural; level >= kCellLevel && !done; --level) {
        auto r = detail::solve_hop_at(world, hop, cur, consumed, level, params);
        spent += r.record.backups;
        if (detail::segment_follows_hop(world, table, hop, r.cells)) {
          r.record.fallback = level != natural;
          done = std::move(r);
        }
      }
      att.backups += spent;
      if (!done) throw InfeasibleError("hop q" + std::to_string(hop.from) + " -> q" + std::to_string(hop.to) +
                                       " could not be grounded consistently");
      done->record.backups = spent;
      cells.insert(cells.end(), done->cells.begin(), done->cells.end());
      records.push_back(std::move(done->record));
    }
  } catch (const GroundingError& e) {
    att.reason = e.what();
    return att;
  } catch (const InfeasibleError& e) {
    att.reason = e.what();
    return att;
  }
  att.feasible = true;
  att.actions = cells.size() - 1;
  if (trace) *trace = std::move(cells);
  if (hops) *hops = std::move(records);
  return att;
}

inline void fill_actions(Plan& plan) {
  plan.actions.clear();
  for (std::size_t i = 1; i < plan.states.size(); ++i) {
    const auto m = move_between(plan.states[i - 1], plan.states[i]);
    if (!m) throw Error(ErrorKind::Usage, "plan states " + std::to_string(i - 1) + " and " + std::to_string(i) + " are not adjacent");
    plan.actions.push_back(*m);
  }
}

/// Hierarchical planner: decompose the pruned automaton into paths, solve
/// each hop at the lowest level of its guards, ground to primitive moves and
/// keep the candidate with the fewest primitive actions (earliest path on
/// ties).
inline Plan solve_apmdp(const WorldModel& world, const Formula& f, const Cell& start, const RewardParams& params,
                        const Translation* pre = nullptr) {
  params.validate();
  if (!world.contains(start)) throw ConfigError("start " + to_string(start) + " is outside the world");
  Plan plan;
  plan.world_id = world.id();
  plan.formula = to_string(f);
  plan.method = "apmdp";
  plan.start = start;
  const Translation tr = pre ? *pre : translate(world, f);
  plan.translate_seconds = tr.seconds;
  plan.automaton_size = tr.pruned.size();

  const auto t0 = std::chrono::steady_clock::now();
  const DbaWorldTable table(world, tr.pruned);
  const auto paths = find_paths(tr.pruned);
  std::optional<std::size_t> best;
  std::vector<Cell> best_trace;
  std::vector<HopRecord> best_hops;
  for (const auto& path : paths) {
    std::vector<Cell> trace;
    std::vector<HopRecord> hops;
    auto att = solve_path(world, tr.pruned, table, path, start, params, &trace, &hops);
    plan.backups += att.backups;
    if (att.feasible && (!best || att.actions < plan.attempts[*best].actions)) {
      best = plan.attempts.size();
      best_trace = std::move(trace);
      best_hops = std::move(hops);
    }
    plan.attempts.push_back(std::move(att));
  }
  plan.plan_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!best) {
    std::string why = paths.empty() ? "no accepting automaton state is reachable" : "every automaton path failed";
    for (const auto& a : plan.attempts) {
      std::string p;
      for (auto q : a.states) p += (p.empty() ? "q" : " q") + std::to_string(q);
      why += "; [" + p + "] " + a.reason;
    }
    throw InfeasibleError(why);
  }
  plan.states = std::move(best_trace);
  plan.hops = std::move(best_hops);
  plan.automaton_path = plan.attempts[*best].states;
  fill_actions(plan);
  const auto chk = check_plan(world, tr.pruned, plan);
  if (!chk.satisfied) throw Error(ErrorKind::Usage, "internal error: AP-MDP plan fails verification: " + chk.reason);
  return plan;
}

/// Flat baseline: value iteration on the full product of the level-0 world
/// and the pruned automaton.
inline Plan solve_pmdp(const WorldModel& world, const Formula& f, const Cell& start, const RewardParams& params,
                       const Translation* pre = nullptr) {
  params.validate();
  if (!world.contains(start)) throw ConfigError("start " + to_string(start) + " is outside the world");
  Plan plan;
  plan.world_id = world.id();
  plan.formula = to_string(f);
  plan.method = "pmdp";
  plan.start = start;
  const Translation tr = pre ? *pre : translate(world, f);
  plan.translate_seconds = tr.seconds;
  plan.automaton_size = tr.pruned.size();

  const auto t0 = std::chrono::steady_clock::now();
  const auto pm = build_product(world, tr.pruned, start, params);
  const auto vi = value_iteration(pm.mdp, params);
  plan.backups = vi.backups;
  auto finish = [&] { plan.plan_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  Rollout roll;
  if (pm.mdp.info(pm.initial).terminal) {
    if (!pm.mdp.info(pm.initial).goal) {
      finish();
      throw InfeasibleError("the start cell already violates the specification");
    }
    roll.states = {pm.initial};
  } else {
    try {
      roll = extract_plan(pm.mdp, vi, pm.initial);
    } catch (const InfeasibleError& e) {
      finish();
      throw InfeasibleError(std::string("product MDP: ") + e.what());
    }
  }
  finish();
  plan.states.push_back(start);
  for (std::size_t i = 1; i < roll.states.size(); ++i) plan.states.push_back(world.cell_at(pm.cell_of(roll.states[i])));
  plan.automaton_path.push_back(tr.pruned.initial());
  for (auto s : roll.states)
    if (pm.q_of(s) != plan.automaton_path.back()) plan.automaton_path.push_back(pm.q_of(s));
  fill_actions(plan);
  const auto chk = check_plan(world, tr.pruned, plan);
  if (!chk.satisfied) throw Error(ErrorKind::Usage, "internal error: P-MDP plan fails verification: " + chk.reason);
  return plan;
}

enum class Method { ApMdp, PMdp };

inline const char* method_name(Method m) { return m == Method::ApMdp ? "apmdp" : "pmdp"; }

inline Plan solve(Method m, const WorldModel& world, const Formula& f, const Cell& start, const RewardParams& params,
                  const Translation* pre = nullptr) {
  return m == Method::ApMdp ? solve_apmdp(world, f, start, params, pre) : solve_pmdp(world, f, start, params, pre);
}

}  // namespace apmdp

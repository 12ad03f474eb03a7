#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "apmdp/automaton.hpp"
#include "apmdp/error.hpp"
#include "apmdp/ltl.hpp"
#include "apmdp/mdp.hpp"
#include "apmdp/world.hpp"

namespace apmdp {

/// Throws if the guard mentions a proposition below `level`; returns true.
inline bool check_guard_level(const Formula& g, int level) {
  if (g.op() == Op::Atom && g.prop().level < level)
    throw Error(ErrorKind::Usage, "guard proposition '" + g.prop().name + "' is below level " + std::to_string(level));
  for (const auto& c : g.children()) check_guard_level(c, level);
  return true;
}

/// Evaluates a guard on the (sorted) label of a level-`level` state. An atom
/// holds iff its proposition is in the label.
inline bool eval_guard(const Formula& g, std::span<const PropId> labels, int level) {
  check_guard_level(g, level);
  return eval_boolean(g, [&](PropId id) { return std::binary_search(labels.begin(), labels.end(), id); });
}

/// Lowest proposition level of a hop; guards without atoms are solved at the
/// top level.
inline int hop_level(const Formula& goal, const Formula& stay) {
  int level = kLevelCount - 1;
  for (const auto* g : {&goal, &stay})
    for (const auto& p : atoms(*g)) level = std::min(level, p.level);
  return level;
}

/// A reach problem over a set of abstract states of one level. MDP state i
/// is states[i]; the action code is the index of the successor in `states`.
struct SubproblemMdp {
  int level = kCellLevel;
  std::vector<AbstractState> states;
  std::vector<std::size_t> index;  // abstract id -> MDP index, kNoAction if absent
  TabularMdp mdp;
  std::size_t initial = 0;
  Formula goal = Formula::constant(true);
  Formula stay = Formula::constant(true);

  std::size_t index_of(const AbstractState& s) const {
    if (s.level != level || s.id >= index.size() || index[s.id] == kNoAction)
      throw Error(ErrorKind::Usage, "state outside the subproblem");
    return index[s.id];
  }
};

/// Builds a reach MDP over `states` (all at one level). Entering a goal state
/// earns gamma_goal, entering a stay-violating state gamma_stay, anything else
/// gamma_step (goal wins over stay). Goal and stay-violating states are
/// terminal. Moves leaving the state set are dropped.
inline SubproblemMdp build_reach_mdp(const WorldModel& world, int level, std::vector<AbstractState> states,
                                     const std::function<bool(const AbstractState&)>& is_goal,
                                     const std::function<bool(const AbstractState&)>& stay_ok,
                                     const RewardParams& params) {
  SubproblemMdp sp;
  sp.level = level;
  sp.states = std::move(states);
  sp.index.assign(world.state_count(level), kNoAction);
  for (std::size_t i = 0; i < sp.states.size(); ++i) sp.index[sp.states[i].id] = i;
  for (const auto& s : sp.states) {
    const bool goal = is_goal(s);
    const bool violated = !goal && !stay_ok(s);
    const double reward = goal ? params.gamma_goal : violated ? params.gamma_stay : params.gamma_step;
    sp.mdp.add_state(reward, goal || violated, goal);
    for (const auto& [action, next] : world.neighbors(s)) {
      (void)action;
      const auto j = sp.index[next.id];
      if (j != kNoAction) sp.mdp.add_action(j, j);
    }
  }
  return sp;
}

/// The abstract MDP for one automaton hop: every state of the hop's level,
/// goal = the edge guard, stay = the self-loop guard.
inline SubproblemMdp build_subproblem(const WorldModel& world, const PathHop& hop, const Cell& start,
                                      const RewardParams& params) {
  const int level = hop_level(hop.goal, hop.stay);
  check_guard_level(hop.goal, level);
  check_guard_level(hop.stay, level);
  std::vector<AbstractState> states;
  for (std::size_t i = 0; i < world.state_count(level); ++i) states.push_back({level, i});
  auto holds = [&](const Formula& g) {
    return [&world, g, level](const AbstractState& s) { return eval_guard(g, world.label(s), level); };
  };
  auto sp = build_reach_mdp(world, level, std::move(states), holds(hop.goal), holds(hop.stay), params);
  sp.goal = hop.goal;
  sp.stay = hop.stay;
  sp.initial = sp.index_of(world.project(start, level));
  bool any_goal = false;
  for (std::size_t i = 0; i < sp.mdp.size() && !any_goal; ++i) any_goal = sp.mdp.info(i).goal;
  if (!any_goal)
    throw InfeasibleError("no state at level " + std::to_string(level) + " satisfies goal '" + to_string(hop.goal) +
                          "'");
  return sp;
}

}  // namespace apmdp

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/product_bfs.hpp"
#include "support.hpp"

using namespace apmdp;
using testing_support::e1;

namespace {

Formula F(const std::string& text) { return parse(text, e1().registry()); }

PathHop hop(const std::string& goal, const std::string& stay) {
  return PathHop{0, 1, F(goal), stay == "false" ? Formula::constant(false) : stay == "true" ? Formula::constant(true) : F(stay)};
}

// Corridor 0 - 1 - ... - (n-1) with the goal at the far end.
TabularMdp corridor(std::size_t n, const RewardParams& p) {
  TabularMdp m;
  for (std::size_t k = 0; k < n; ++k) {
    const bool goal = k + 1 == n;
    m.add_state(goal ? p.gamma_goal : p.gamma_step, goal, goal);
    if (goal) continue;
    if (k > 0) m.add_action(0, k - 1);
    m.add_action(1, k + 1);
  }
  return m;
}

// Breadth-first reachability of a goal state through non-terminal states.
bool goal_reachable(const TabularMdp& m, std::size_t start) {
  std::vector<bool> seen(m.size(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const auto s = stack.back();
    stack.pop_back();
    if (m.info(s).goal) return true;
    if (m.info(s).terminal) continue;
    for (std::size_t a = 0; a < m.action_count(s); ++a)
      for (const auto& o : m.outcomes(s, a))
        if (!seen[o.next]) {
          seen[o.next] = true;
          stack.push_back(o.next);
        }
  }
  return false;
}

}  // namespace

TEST(Params, Validation) {
  RewardParams p;
  EXPECT_NO_THROW(p.validate());
  p.discount = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.gamma_stay = -0.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.gamma_goal = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.epsilon = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(EvalGuard, Examples) {
  const auto& w = e1();
  EXPECT_TRUE(eval_guard(F("floor_2 & !green_room"), w.label(AbstractState{kRoomLevel, 10}), kRoomLevel));
  EXPECT_FALSE(eval_guard(F("floor_2 & !green_room"), w.label(AbstractState{kRoomLevel, 7}), kRoomLevel));
  EXPECT_TRUE(eval_guard(Formula::constant(true), {}, kFloorLevel));
  for (std::size_t r = 0; r < w.rooms().size(); ++r)
    EXPECT_EQ(eval_guard(F("red_room & floor_1"), w.label(AbstractState{kRoomLevel, r}), kRoomLevel), r == 3) << r;
  EXPECT_THROW(eval_guard(F("landmark_1"), w.label(AbstractState{kRoomLevel, 3}), kRoomLevel), Error);
}

TEST(Subproblem, LevelIsTheLowestGuardLevel) {
  EXPECT_EQ(hop_level(F("green_room"), F("!floor_2")), kRoomLevel);
  EXPECT_EQ(hop_level(F("floor_1"), Formula::constant(true)), kFloorLevel);
  EXPECT_EQ(hop_level(F("landmark_1"), Formula::constant(true)), kCellLevel);
  EXPECT_EQ(hop_level(Formula::constant(true), Formula::constant(false)), kFloorLevel);
}

TEST(Subproblem, LandmarkGoalIsSolvedOverAllCells) {
  const auto& w = e1();
  const auto sp = build_subproblem(w, hop("landmark_1", "true"), Cell{0, 0, 0}, {});
  EXPECT_EQ(sp.level, kCellLevel);
  EXPECT_EQ(sp.mdp.size(), w.cell_count());
  EXPECT_EQ(sp.states[sp.initial], w.project(Cell{0, 0, 0}, kCellLevel));
  std::size_t goals = 0;
  for (std::size_t i = 0; i < sp.mdp.size(); ++i) goals += sp.mdp.info(i).goal;
  EXPECT_EQ(goals, 1u);
}

TEST(Subproblem, GreenRoomUnderNotFloor2FromTheSecondFloorHasNoPlan) {
  const auto& w = e1();
  const RewardParams p;
  const auto sp = build_subproblem(w, hop("green_room", "!floor_2"), *w.start("second_floor"), p);
  EXPECT_EQ(sp.level, kRoomLevel);
  EXPECT_EQ(sp.mdp.size(), 18u);
  // Every floor-2 room other than green violates the stay condition.
  for (std::size_t r = 0; r < 18; ++r) {
    const auto& info = sp.mdp.info(sp.index_of({kRoomLevel, r}));
    EXPECT_EQ(info.goal, r == 7);
    EXPECT_EQ(info.terminal, w.rooms()[r].floor == 1);
    if (info.terminal && !info.goal) { EXPECT_EQ(info.entry_reward, p.gamma_stay); }
  }
  const auto vi = value_iteration(sp.mdp, p);
  EXPECT_THROW(extract_plan(sp.mdp, vi, sp.initial), NoPlanError);
}

TEST(Subproblem, Phi1GoalBeforeAndAfterPruning) {
  const auto& w = e1();
  const auto t = translate(w, F("F ((floor_2 | red_room) & F floor_1)"));
  const auto raw = *t.raw.guard(0, t.raw.size() - 1);
  const auto expected = F("red_room & floor_1 | floor_2 & floor_1");
  const std::vector<Prop> vars{w.registry()[*w.registry().find("floor_1")],
                               w.registry()[*w.registry().find("floor_2")],
                               w.registry()[*w.registry().find("red_room")]};
  ASSERT_TRUE(t.raw.accepting(t.raw.size() - 1));
  for (std::uint32_t m = 0; m < 8; ++m) EXPECT_EQ(eval_minterm(raw, vars, m), eval_minterm(expected, vars, m)) << m;
  const auto paths = find_paths(t.pruned);
  ASSERT_FALSE(paths.empty());
  EXPECT_EQ(to_string(paths[0].hops[0].goal), "red_room");
  const auto sp = build_subproblem(w, paths[0].hops[0], w.default_start(), {});
  EXPECT_EQ(sp.level, kRoomLevel);
}

TEST(Subproblem, UnreachableGoalIsInfeasible) {
  const auto& w = e1();
  EXPECT_THROW(build_subproblem(w, hop("floor_1 & floor_2", "true"), Cell{}, {}), InfeasibleError);
}

TEST(ValueIteration, CorridorMatchesClosedForm) {
  RewardParams p;
  p.epsilon = 1e-12;
  for (std::size_t n : {2u, 3u, 7u, 20u}) {
    const auto m = corridor(n, p);
    const auto r = value_iteration(m, p);
    ASSERT_TRUE(r.converged);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const std::size_t d = n - 1 - k;
      double expected = 0.0;
      for (std::size_t i = 0; i + 1 < d; ++i) expected += std::pow(p.discount, double(i)) * p.gamma_step;
      expected += std::pow(p.discount, double(d - 1)) * p.gamma_goal;
      EXPECT_NEAR(r.values[k], expected, 1e-6) << "n=" << n << " k=" << k;
      EXPECT_EQ(m.action_code(k, r.policy[k]), 1u);
    }
    const auto plan = extract_plan(m, r, 0);
    EXPECT_EQ(plan.actions.size(), n - 1);
    EXPECT_GE(r.backups, n);
    EXPECT_EQ(r.backups, r.sweeps * n);
  }
}

TEST(ValueIteration, SingleGoalStateGivesAnEmptyPlan) {
  RewardParams p;
  TabularMdp m;
  m.add_state(p.gamma_goal, true, true);
  const auto r = value_iteration(m, p);
  EXPECT_EQ(r.policy[0], kNoAction);
  const auto plan = extract_plan(m, r, 0);
  EXPECT_EQ(plan.states, std::vector<std::size_t>{0});
  EXPECT_TRUE(plan.actions.empty());
}

TEST(ValueIteration, TiesKeepTheFirstAction) {
  RewardParams p;
  TabularMdp m;
  m.add_state(p.gamma_step, false);
  m.add_action(5, 1);
  m.add_action(3, 2);
  m.add_state(p.gamma_goal, true, true);
  m.add_state(p.gamma_goal, true, true);
  const auto r = value_iteration(m, p);
  EXPECT_EQ(m.action_code(0, r.policy[0]), 5u);
}

TEST(ValueIteration, CycleIsReportedAsDiverged) {
  RewardParams p;
  TabularMdp m;
  m.add_state(p.gamma_step, false);
  m.add_action(0, 1);
  m.add_state(p.gamma_step, false);
  m.add_action(0, 0);
  const auto r = value_iteration(m, p);
  EXPECT_THROW(extract_plan(m, r, 0), PlanDivergedError);
}

TEST(ValueIteration, ConvergedResidualIsBelowEpsilon) {
  const auto& w = e1();
  const RewardParams p;
  const auto t = translate(w, F("F (red_room & F landmark_3)"));
  const auto pm = build_product(w, t.pruned, Cell{}, p);
  const auto r = value_iteration(pm.mdp, p);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.residual, p.epsilon);
  EXPECT_EQ(r.backups, r.sweeps * pm.mdp.size());
}

TEST(Product, TransitionsFollowTheAutomaton) {
  const auto& w = e1();
  const auto t = translate(w, F("!blue_room U landmark_1"));
  const auto pm = build_product(w, t.pruned, Cell{}, {});
  for (std::size_t s = 0; s < pm.mdp.size(); ++s) {
    if (pm.mdp.info(s).terminal) continue;
    const auto q = pm.q_of(s);
    for (std::size_t a = 0; a < pm.mdp.action_count(s); ++a) {
      const auto next = pm.mdp.outcomes(s, a).front().next;
      const auto c2 = w.cell_at(pm.cell_of(next));
      const auto expected = oracle::read(w, t.pruned, q, c2);
      ASSERT_TRUE(expected.has_value());
      EXPECT_EQ(pm.q_of(next), *expected);
      const auto c1 = w.cell_at(pm.cell_of(s));
      EXPECT_EQ(std::abs(c1.x - c2.x) + std::abs(c1.y - c2.y) + std::abs(c1.z - c2.z), 1);
    }
  }
}

TEST(Pmdp, EventuallyRedMatchesBfs) {
  const auto& w = e1();
  const RewardParams p;
  const auto f = F("F red_room");
  const auto t = translate(w, f);
  for (std::size_t i = 0; i < w.cell_count(); i += 5) {
    const Cell start = w.cell_at(i);
    const auto bfs = oracle::shortest_accepting(w, t.pruned, start);
    ASSERT_TRUE(bfs.has_value());
    const auto plan = solve_pmdp(w, f, start, p, &t);
    EXPECT_EQ(plan.actions.size(), bfs->length) << to_string(start);
  }
}

TEST(Solve, RandomSubproblemsEndInAGoalState) {
  const auto& w = e1();
  const RewardParams p;
  std::mt19937_64 rng(61);
  const auto& props = w.registry().props();
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::size_t solved = 0;
  for (int i = 0; i < 100; ++i) {
    const auto goal = Formula::atom(props[pick(props.size())]);
    Formula stay = Formula::constant(true);
    if (i % 2) {
      const auto avoid = props[pick(props.size())];
      if (avoid.id != goal.prop().id) stay = Formula::make_not(Formula::atom(avoid));
    }
    const Cell start = w.cell_at(pick(w.cell_count()));
    const PathHop h{0, 1, goal, stay};
    const auto sp = build_subproblem(w, h, start, p);
    const auto vi = value_iteration(sp.mdp, p);
    EXPECT_TRUE(vi.converged);
    Rollout roll;
    try {
      roll = extract_plan(sp.mdp, vi, sp.initial);
    } catch (const InfeasibleError&) {
      EXPECT_FALSE(goal_reachable(sp.mdp, sp.initial)) << to_string(goal) << " from " << to_string(start);
      continue;
    }
    ++solved;
    const auto last = sp.states[roll.states.back()];
    EXPECT_TRUE(eval_guard(goal, w.label(last), sp.level));
    for (std::size_t k = 1; k + 1 < roll.states.size(); ++k)
      EXPECT_TRUE(eval_guard(stay, w.label(sp.states[roll.states[k]]), sp.level));
  }
  EXPECT_GE(solved, 60u);
}

TEST(Solve, BackupsAreDeterministic) {
  const auto& w = e1();
  const auto f = F("F (landmark_2 & F purple_room)");
  const auto a = solve_apmdp(w, f, Cell{3, 3, 2}, {});
  const auto b = solve_apmdp(w, f, Cell{3, 3, 2}, {});
  EXPECT_EQ(a.backups, b.backups);
  EXPECT_EQ(a.actions, b.actions);
  const auto c = solve_pmdp(w, f, Cell{3, 3, 2}, {});
  const auto d = solve_pmdp(w, f, Cell{3, 3, 2}, {});
  EXPECT_EQ(c.backups, d.backups);
}

// Plans the two E1 walkthrough tasks with both planners and prints the
// automaton paths that were tried.

#include <iostream>

#include "apmdp/apmdp.hpp"

int main() {
  const auto world = apmdp::load_world(APMDP_WORLD_DIR "/e1.world");
  const struct {
    const char* formula;
    const char* start;
  } tasks[] = {
      {"F ((floor_2 | red_room) & F floor_1)", "default"},
      {"F (floor_2 & F green_room)", "second_floor"},
  };
  for (const auto& t : tasks) {
    const auto f = apmdp::parse(t.formula, world.registry());
    const auto start = *world.start(t.start);
    std::cout << t.formula << " from " << apmdp::to_string(start) << "\n";
    for (auto m : {apmdp::Method::ApMdp, apmdp::Method::PMdp}) {
      const auto plan = apmdp::solve(m, world, f, start, {});
      std::cout << "  " << plan.method << ": " << plan.actions.size() << " actions, " << plan.backups
                << " backups:";
      for (auto a : plan.actions) std::cout << ' ' << apmdp::move_name(a);
      std::cout << "\n";
      for (const auto& a : plan.attempts) {
        std::cout << "    path";
        for (auto q : a.states) std::cout << " q" << q;
        std::cout << (a.feasible ? " -> " + std::to_string(a.actions) + " actions" : " -> " + a.reason) << "\n";
      }
    }
  }
}

#pragma once

#include <string>
#include <vector>

#include "apmdp/automaton.hpp"
#include "apmdp/error.hpp"
#include "apmdp/mdp.hpp"
#include "apmdp/world.hpp"

namespace apmdp {

/// Labeled transition table of a pruned automaton over the cells of a world:
/// next(q, c) is the automaton state after reading the label of cell c in q.
class DbaWorldTable {
 public:
  DbaWorldTable(const WorldModel& world, const Dba& dba) : cells_(world.cell_count()), next_(dba.size() * cells_) {
    for (std::size_t c = 0; c < cells_; ++c) {
      const auto label = world.label(AbstractState{kCellLevel, c});
      auto truth = [&](PropId id) { return std::binary_search(label.begin(), label.end(), id); };
      for (StateIndex q = 0; q < dba.size(); ++q) {
        const auto t = dba.step(q, truth);
        if (!t)
          throw Error(ErrorKind::Usage, "automaton state " + std::to_string(q) + " has no transition for cell " +
                                            to_string(world.cell_at(c)));
        next_[q * cells_ + c] = *t;
      }
    }
  }

  StateIndex next(StateIndex q, std::size_t cell) const { return next_[q * cells_ + cell]; }

 private:
  std::size_t cells_;
  std::vector<StateIndex> next_;
};

/// Synchronous product of the level-0 world and a pruned automaton. State
/// (c, q) has index c * |Q| + q; moves are primitive and deterministic, and
/// the automaton reads the label of the cell being entered. Accepting and dead
/// automaton states are terminal; entering a dead state costs gamma_stay.
struct ProductMdp {
  std::size_t automaton_states = 0;
  TabularMdp mdp;
  std::size_t initial = 0;

  std::size_t index(std::size_t cell, StateIndex q) const { return cell * automaton_states + q; }
  std::size_t cell_of(std::size_t s) const { return s / automaton_states; }
  StateIndex q_of(std::size_t s) const { return s % automaton_states; }
};

inline ProductMdp build_product(const WorldModel& world, const Dba& dba, const Cell& start, const RewardParams& p) {
  const DbaWorldTable table(world, dba);
  ProductMdp pm;
  pm.automaton_states = dba.size();
  for (std::size_t c = 0; c < world.cell_count(); ++c) {
    const auto moves = world.neighbors(AbstractState{kCellLevel, c});
    for (StateIndex q = 0; q < dba.size(); ++q) {
      const bool acc = dba.accepting(q);
      const bool dead = dba.dead(q);
      pm.mdp.add_state(acc ? p.gamma_goal : dead ? p.gamma_stay : p.gamma_step, acc || dead, acc);
      for (const auto& [action, next] : moves) pm.mdp.add_action(action.code, pm.index(next.id, table.next(q, next.id)));
    }
  }
  const auto c0 = world.cell_index(start);
  pm.initial = pm.index(c0, table.next(dba.initial(), c0));
  return pm;
}

}  // namespace apmdp

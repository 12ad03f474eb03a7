#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "apmdp/boolean.hpp"
#include "apmdp/error.hpp"
#include "apmdp/facts.hpp"
#include "apmdp/ltl.hpp"

namespace apmdp {

using StateIndex = std::size_t;

struct DbaEdge {
  Formula guard;
  StateIndex target = 0;
};

/// Deterministic Buchi automaton whose transitions carry Boolean guards over
/// propositions rather than explicit letters. A finite word is accepted when
/// the run ends in an accepting state; for the co-safe templates this is the
/// same as the run reaching an accepting state.
class Dba {
 public:
  struct State {
    Formula label;  // residual obligation the state stands for
    bool accepting = false;
    std::vector<DbaEdge> edges;  // sorted by target
  };

  Dba() = default;
  Dba(std::vector<State> states, StateIndex initial) : states_(std::move(states)), initial_(initial) {
    compute_dead();
  }

  std::size_t size() const noexcept { return states_.size(); }
  StateIndex initial() const noexcept { return initial_; }
  const State& state(StateIndex q) const { return states_.at(q); }
  const std::vector<State>& states() const noexcept { return states_; }
  bool accepting(StateIndex q) const { return states_.at(q).accepting; }
  const std::vector<DbaEdge>& edges(StateIndex q) const { return states_.at(q).edges; }

  /// True when no accepting state is reachable from q (rejecting sink).
  bool dead(StateIndex q) const { return dead_.at(q); }

  std::optional<Formula> guard(StateIndex from, StateIndex to) const {
    for (const auto& e : edges(from))
      if (e.target == to) return e.guard;
    return std::nullopt;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& s : states_) n += s.edges.size();
    return n;
  }

  /// Successor on a letter given as a truth function over PropIds. Returns
  /// nullopt if no guard holds, which only happens for letters excluded by the
  /// facts used to prune the automaton.
  template <class Truth>
  std::optional<StateIndex> step(StateIndex q, const Truth& truth) const {
    for (const auto& e : edges(q))
      if (eval_boolean(e.guard, truth)) return e.target;
    return std::nullopt;
  }

  /// Propositions mentioned on any guard, ordered by id.
  std::vector<Prop> props() const {
    std::map<PropId, Prop> m;
    for (const auto& s : states_)
      for (const auto& e : s.edges) collect_atoms(e.guard, m);
    std::vector<Prop> out;
    for (auto& [_, p] : m) out.push_back(p);
    return out;
  }

 private:
  void compute_dead() {
    dead_.assign(states_.size(), true);
    std::vector<std::vector<StateIndex>> preds(states_.size());
    std::deque<StateIndex> work;
    for (StateIndex q = 0; q < states_.size(); ++q) {
      for (const auto& e : states_[q].edges) preds[e.target].push_back(q);
      if (states_[q].accepting) {
        dead_[q] = false;
        work.push_back(q);
      }
    }
    while (!work.empty()) {
      const auto q = work.front();
      work.pop_front();
      for (auto p : preds[q])
        if (dead_[p]) {
          dead_[p] = false;
          work.push_back(p);
        }
    }
  }

  std::vector<State> states_;
  StateIndex initial_ = 0;
  std::vector<bool> dead_;
};

// ---------------------------------------------------------------------------
// Progression.

/// Rewrites f into the obligation that remains after reading one letter.
template <class Truth>
Formula progress(const Formula& f, const Truth& truth) {
  switch (f.op()) {
    case Op::True:
    case Op::False: return f;
    case Op::Atom: return Formula::constant(truth(f.prop().id));
    case Op::Not:
      if (f.child(0).op() != Op::Atom) throw Error(ErrorKind::Usage, "progress: formula is not in NNF");
      return Formula::constant(!truth(f.child(0).prop().id));
    case Op::And:
    case Op::Or: {
      std::vector<Formula> parts;
      for (const auto& c : f.children()) parts.push_back(progress(c, truth));
      return f.op() == Op::And ? conj(std::move(parts)) : disj(std::move(parts));
    }
    case Op::Finally: return disj(progress(f.child(0), truth), f);
    case Op::Globally: return conj(progress(f.child(0), truth), f);
    case Op::Until: return disj(progress(f.child(1), truth), conj(progress(f.child(0), truth), f));
    case Op::Release: return conj(progress(f.child(1), truth), disj(progress(f.child(0), truth), f));
  }
  return f;
}

/// Truth of f on the empty remainder of a finite trace.
inline bool nullable(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::Globally:
    case Op::Release: return true;
    case Op::And:
      return std::all_of(f.children().begin(), f.children().end(), [](const Formula& c) { return nullable(c); });
    case Op::Or:
      return std::any_of(f.children().begin(), f.children().end(), [](const Formula& c) { return nullable(c); });
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// Supported fragment: Boolean combinations of co-safe formulas (F, U over
// co-safe operands) and safety formulas (G, R over safety operands). Inside
// that class the "end in a nullable state" condition is a correct Buchi
// acceptance for progression automata.

enum class FragmentClass { Boolean, CoSafe, Safety, Mixed };

inline FragmentClass classify_fragment(const Formula& f) {
  auto fail = [&](const std::string& why) -> FragmentClass {
    throw UnsupportedFragmentError(why + " in '" + to_string(f) + "'");
  };
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom: return FragmentClass::Boolean;
    case Op::Not:
      if (f.child(0).op() != Op::Atom) return fail("negation above a non-atom (formula not in NNF)");
      return FragmentClass::Boolean;
    case Op::Finally:
    case Op::Until:
      for (const auto& c : f.children()) {
        const auto k = classify_fragment(c);
        if (k != FragmentClass::Boolean && k != FragmentClass::CoSafe)
          return fail("G or Release nested under F/U");
      }
      return FragmentClass::CoSafe;
    case Op::Globally:
    case Op::Release:
      for (const auto& c : f.children()) {
        const auto k = classify_fragment(c);
        if (k != FragmentClass::Boolean && k != FragmentClass::Safety)
          return fail("F or Until nested under G/Release");
      }
      return FragmentClass::Safety;
    case Op::And:
    case Op::Or: {
      bool cosafe = false, safety = false;
      for (const auto& c : f.children()) {
        switch (classify_fragment(c)) {
          case FragmentClass::Boolean: break;
          case FragmentClass::CoSafe: cosafe = true; break;
          case FragmentClass::Safety: safety = true; break;
          case FragmentClass::Mixed: cosafe = safety = true; break;
        }
      }
      if (cosafe && safety) return FragmentClass::Mixed;
      if (cosafe) return FragmentClass::CoSafe;
      if (safety) return FragmentClass::Safety;
      return FragmentClass::Boolean;
    }
  }
  return FragmentClass::Boolean;
}

// ---------------------------------------------------------------------------
// Invariant checks over fact-consistent letters.

struct GuardCheck {
  bool ok = true;
  StateIndex state = 0;
  std::string detail;
};

/// Every fact-consistent letter satisfies exactly one outgoing guard of each
/// state (determinism and completeness together).
inline GuardCheck check_guards(const Dba& dba, const MutexFacts& facts = {}) {
  for (StateIndex q = 0; q < dba.size(); ++q) {
    std::map<PropId, Prop> m;
    for (const auto& e : dba.edges(q)) collect_atoms(e.guard, m);
    std::vector<Prop> vars;
    for (auto& [_, p] : m) vars.push_back(p);
    if (vars.size() > kMaxTruthTableVars) return {false, q, "too many propositions to enumerate"};
    for (std::uint32_t mt = 0; mt < (1u << vars.size()); ++mt) {
      if (!facts.consistent(vars, mt)) continue;
      int hits = 0;
      for (const auto& e : dba.edges(q))
        if (eval_minterm(e.guard, vars, mt)) ++hits;
      if (hits != 1)
        return {false, q, (hits == 0 ? "incomplete" : "nondeterministic") + std::string(" on minterm ") +
                              std::to_string(mt)};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------

/// Translates an LTL formula into a DBA by formula progression: states are the
/// distinct simplified residual formulas, and the guard from one state to
/// another is the minimised set of letters that progresses the first into the
/// second. The `true` state is the accepting sink; `false`, when reachable, is
/// the rejecting sink.
inline Dba ltl_to_dba(const Formula& input) {
  const Formula root = is_nnf(input) ? input : to_nnf(input);
  classify_fragment(root);

  std::vector<Formula> labels;
  std::unordered_map<std::string, StateIndex> index;
  auto intern = [&](const Formula& f) {
    auto [it, inserted] = index.emplace(f.key(), labels.size());
    if (inserted) labels.push_back(f);
    return it->second;
  };

  // Canonicalise the root so it merges with equal residuals.
  std::function<Formula(const Formula&)> canon = [&](const Formula& f) -> Formula {
    if (f.op() == Op::And || f.op() == Op::Or) {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(canon(c));
      return f.op() == Op::And ? conj(std::move(cs)) : disj(std::move(cs));
    }
    if (f.children().empty() || f.op() == Op::Not) return f;
    std::vector<Formula> cs;
    for (const auto& c : f.children()) cs.push_back(canon(c));
    return Formula::make(f.op(), std::move(cs));
  };
  const StateIndex initial = intern(canon(root));

  std::vector<Dba::State> states;
  for (StateIndex q = 0; q < labels.size(); ++q) {
    const Formula phi = labels[q];
    Dba::State st;
    st.label = phi;
    st.accepting = nullable(phi);
    if (phi.is_true() || phi.is_false()) {
      st.edges.push_back({Formula::constant(true), q});
      states.push_back(std::move(st));
      continue;
    }
    const auto vars = atoms(phi);
    if (vars.size() > kMaxTruthTableVars)
      throw UnsupportedFragmentError("state '" + to_string(phi) + "' mentions too many propositions");
    const std::uint32_t n = 1u << vars.size();
    std::map<StateIndex, std::vector<bool>> on;
    for (std::uint32_t m = 0; m < n; ++m) {
      auto truth = [&](PropId id) {
        for (std::size_t i = 0; i < vars.size(); ++i)
          if (vars[i].id == id) return (m >> i & 1u) != 0;
        return false;
      };
      const StateIndex t = intern(progress(phi, truth));
      auto& bits = on[t];
      if (bits.empty()) bits.assign(n, false);
      bits[m] = true;
    }
    const std::vector<bool> none(n, false);
    for (auto& [t, bits] : on)
      st.edges.push_back({cubes_to_formula(minimize(static_cast<int>(vars.size()), bits, none), vars), t});
    states.push_back(std::move(st));
  }

  Dba dba(std::move(states), initial);
  if (auto chk = check_guards(dba); !chk.ok)
    throw UnsupportedFragmentError("state " + std::to_string(chk.state) + " is " + chk.detail);
  return dba;
}

/// Conjoins every guard with the world facts and re-minimises it over the
/// fact-consistent letters; guards left unsatisfiable are dropped and states
/// no longer reachable from the initial state are removed (the remaining
/// states keep their relative order).
inline Dba remove_contradictions(const Dba& dba, const MutexFacts& facts) {
  std::vector<std::vector<DbaEdge>> edges(dba.size());
  for (StateIndex q = 0; q < dba.size(); ++q) {
    for (const auto& e : dba.edges(q)) {
      const auto vars = atoms(e.guard);
      if (vars.size() > kMaxTruthTableVars)
        throw UnsupportedFragmentError("guard mentions too many propositions");
      const std::uint32_t n = 1u << vars.size();
      std::vector<bool> on(n, false), dc(n, false);
      bool any = false;
      for (std::uint32_t m = 0; m < n; ++m) {
        if (!facts.consistent(vars, m)) {
          dc[m] = true;
        } else if (eval_minterm(e.guard, vars, m)) {
          on[m] = true;
          any = true;
        }
      }
      if (!any) continue;
      edges[q].push_back({cubes_to_formula(minimize(static_cast<int>(vars.size()), on, dc), vars), e.target});
    }
  }
  if (edges[dba.initial()].empty())
    throw InfeasibleError("every transition of the initial automaton state contradicts the world facts");

  std::vector<bool> reach(dba.size(), false);
  std::deque<StateIndex> work{dba.initial()};
  reach[dba.initial()] = true;
  while (!work.empty()) {
    const auto q = work.front();
    work.pop_front();
    for (const auto& e : edges[q])
      if (!reach[e.target]) {
        reach[e.target] = true;
        work.push_back(e.target);
      }
  }
  std::vector<StateIndex> renumber(dba.size(), 0);
  StateIndex next = 0;
  for (StateIndex q = 0; q < dba.size(); ++q)
    if (reach[q]) renumber[q] = next++;

  std::vector<Dba::State> states;
  for (StateIndex q = 0; q < dba.size(); ++q) {
    if (!reach[q]) continue;
    Dba::State st{dba.state(q).label, dba.accepting(q), {}};
    for (const auto& e : edges[q]) st.edges.push_back({e.guard, renumber[e.target]});
    states.push_back(std::move(st));
  }
  return Dba(std::move(states), renumber[dba.initial()]);
}

// ---------------------------------------------------------------------------

struct PathHop {
  StateIndex from = 0;
  StateIndex to = 0;
  Formula goal;  // guard of the edge from -> to
  Formula stay;  // self-loop guard of `from`, or false
};

/// A simple run skeleton from the initial state to an accepting state.
struct AutomatonPath {
  std::vector<StateIndex> states;
  std::vector<PathHop> hops;

  std::string to_string() const {
    std::string s;
    for (auto q : states) s += (s.empty() ? "q" : " q") + std::to_string(q);
    return s;
  }
};

/// Enumerates simple paths from the initial state to accepting states. Paths
/// stop at the first accepting state after the initial one, never enter dead
/// states, and are returned in shortlex order (fewer hops first, then
/// lexicographic on state indices).
inline std::vector<AutomatonPath> find_paths(const Dba& dba) {
  std::vector<std::vector<StateIndex>> found;
  std::vector<StateIndex> stack{dba.initial()};
  std::vector<bool> on_stack(dba.size(), false);
  on_stack[dba.initial()] = true;

  std::function<void(StateIndex)> dfs = [&](StateIndex q) {
    for (const auto& e : dba.edges(q)) {
      const auto t = e.target;
      if (t == q || on_stack[t] || dba.dead(t)) continue;
      stack.push_back(t);
      if (dba.accepting(t)) {
        found.push_back(stack);
      } else {
        on_stack[t] = true;
        dfs(t);
        on_stack[t] = false;
      }
      stack.pop_back();
    }
  };
  if (dba.accepting(dba.initial())) found.push_back(stack);
  if (!dba.dead(dba.initial())) dfs(dba.initial());

  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });

  std::vector<AutomatonPath> out;
  for (auto& states : found) {
    AutomatonPath p;
    p.states = states;
    for (std::size_t j = 0; j + 1 < states.size(); ++j) {
      const auto from = states[j], to = states[j + 1];
      p.hops.push_back({from, to, *dba.guard(from, to), dba.guard(from, from).value_or(Formula::constant(false))});
    }
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text dumps.

inline std::string to_hoa(const Dba& dba, const std::string& name = "") {
  std::ostringstream os;
  const auto props = dba.props();
  os << "HOA-like v1\n";
  if (!name.empty()) os << "name: \"" << name << "\"\n";
  os << "States: " << dba.size() << "\n";
  os << "Start: " << dba.initial() << "\n";
  os << "Accepting:";
  for (StateIndex q = 0; q < dba.size(); ++q)
    if (dba.accepting(q)) os << ' ' << q;
  os << "\nAP: " << props.size();
  for (const auto& p : props) os << " \"" << p.name << '"';
  os << "\n--BODY--\n";
  for (StateIndex q = 0; q < dba.size(); ++q) {
    os << "State: " << q << " \"" << to_string(dba.state(q).label) << '"';
    if (dba.accepting(q)) os << " {accepting}";
    if (dba.dead(q)) os << " {dead}";
    os << '\n';
    for (const auto& e : dba.edges(q)) os << "  [" << to_string(e.guard) << "] " << e.target << '\n';
  }
  os << "--END--\n";
  return os.str();
}

inline std::string to_dot(const Dba& dba, const std::string& name = "dba") {
  std::ostringstream os;
  auto escape = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r;
  };
  os << "digraph \"" << escape(name) << "\" {\n  rankdir=LR;\n  init [shape=point];\n";
  for (StateIndex q = 0; q < dba.size(); ++q)
    os << "  q" << q << " [shape=" << (dba.accepting(q) ? "doublecircle" : "circle") << ", label=\"q" << q
       << "\"];\n";
  os << "  init -> q" << dba.initial() << ";\n";
  for (StateIndex q = 0; q < dba.size(); ++q)
    for (const auto& e : dba.edges(q))
      os << "  q" << q << " -> q" << e.target << " [label=\"" << escape(to_string(e.guard)) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace apmdp

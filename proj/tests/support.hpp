#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "apmdp/apmdp.hpp"

#ifndef APMDP_WORLD_DIR
#error "APMDP_WORLD_DIR must point at the shipped worlds"
#endif
#ifndef APMDP_TEST_DATA_DIR
#error "APMDP_TEST_DATA_DIR must point at tests/data"
#endif

namespace testing_support {

inline std::string world_path(const std::string& name) { return std::string(APMDP_WORLD_DIR) + "/" + name; }
inline std::string data_path(const std::string& name) { return std::string(APMDP_TEST_DATA_DIR) + "/" + name; }

inline const apmdp::WorldModel& e1() {
  static const auto w = apmdp::load_world(world_path("e1.world"));
  return w;
}
inline const apmdp::WorldModel& e2() {
  static const auto w = apmdp::load_world(world_path("e2.world"));
  return w;
}
inline const apmdp::WorldModel& small() {
  static const auto w = apmdp::load_world(data_path("small.world"));
  return w;
}

/// Seeded generator of formulas over a fixed set of atoms.
class FormulaGen {
 public:
  FormulaGen(std::vector<apmdp::Prop> atoms, std::uint64_t seed) : atoms_(std::move(atoms)), rng_(seed) {}

  /// Arbitrary formula over !, &, |, F, G, U.
  apmdp::Formula any(int depth) {
    using apmdp::Formula;
    if (depth == 0 || coin(0.25)) return atom();
    switch (pick(6)) {
      case 0: return Formula::make_not(any(depth - 1));
      case 1: return Formula::make_and(any(depth - 1), any(depth - 1));
      case 2: return Formula::make_or(any(depth - 1), any(depth - 1));
      case 3: return Formula::make_finally(any(depth - 1));
      case 4: return Formula::make_globally(any(depth - 1));
      default: return Formula::make_until(any(depth - 1), any(depth - 1));
    }
  }

  /// Formula in the automaton's fragment: Boolean combinations of co-safe
  /// parts (F/U over co-safe) and safety parts (G over safety).
  apmdp::Formula fragment(int depth) {
    using apmdp::Formula;
    switch (pick(3)) {
      case 0: return cosafe(depth);
      case 1: return safety(depth);
      default: return coin(0.5) ? Formula::make_and(cosafe(depth - 1), safety(depth - 1))
                                : Formula::make_or(cosafe(depth - 1), safety(depth - 1));
    }
  }

  apmdp::Formula cosafe(int depth) {
    using apmdp::Formula;
    if (depth <= 0) return literal();
    switch (pick(5)) {
      case 0: return literal();
      case 1: return Formula::make_finally(cosafe(depth - 1));
      case 2: return Formula::make_until(literal(), cosafe(depth - 1));
      case 3: return Formula::make_and(cosafe(depth - 1), cosafe(depth - 1));
      default: return Formula::make_or(cosafe(depth - 1), cosafe(depth - 1));
    }
  }

  apmdp::Formula safety(int depth) {
    using apmdp::Formula;
    if (depth <= 0) return literal();
    switch (pick(4)) {
      case 0: return Formula::make_globally(literal());
      case 1: return Formula::make_globally(safety(depth - 1));
      case 2: return Formula::make_and(safety(depth - 1), literal());
      default: return Formula::make_or(safety(depth - 1), literal());
    }
  }

  apmdp::Formula atom() { return apmdp::Formula::atom(atoms_[pick(atoms_.size())]); }
  apmdp::Formula literal() { return coin(0.3) ? apmdp::Formula::make_not(atom()) : atom(); }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::vector<apmdp::Prop> atoms_;
  std::mt19937_64 rng_;
};

/// Registry with abstract propositions a, b, c (all level 0).
inline apmdp::PropRegistry abc() {
  apmdp::PropRegistry r;
  r.add("a", 0);
  r.add("b", 0);
  r.add("c", 0);
  return r;
}

/// Random walk of `len` moves inside the world.
inline std::vector<apmdp::Cell> random_walk(const apmdp::WorldModel& w, apmdp::Cell start, std::size_t len,
                                            std::mt19937_64& rng) {
  std::vector<apmdp::Cell> out{start};
  while (out.size() <= len) {
    const auto nb = w.neighbors(w.project(out.back(), apmdp::kCellLevel));
    const auto& next = nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng)].second;
    out.push_back(w.cell_at(next.id));
  }
  return out;
}

}  // namespace testing_support

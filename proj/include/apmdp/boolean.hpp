#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "apmdp/error.hpp"
#include "apmdp/ltl.hpp"

namespace apmdp {

/// Upper bound on the number of propositions enumerated in one truth table.
inline constexpr int kMaxTruthTableVars = 16;

/// A product term over k variables: bit i of `care` says whether variable i
/// appears, bit i of `value` gives its polarity.
struct Cube {
  std::uint32_t value = 0;
  std::uint32_t care = 0;

  bool covers(std::uint32_t minterm) const noexcept { return (minterm & care) == value; }
  int literal_count() const noexcept { return std::popcount(care); }

  friend auto operator<=>(const Cube&, const Cube&) = default;
};

namespace detail {

inline std::vector<Cube> prime_implicants(int nvars, std::span<const std::uint32_t> minterms) {
  const std::uint32_t full = nvars == 32 ? ~0u : ((1u << nvars) - 1u);
  std::set<Cube> current;
  for (auto m : minterms) current.insert(Cube{m, full});
  std::set<Cube> primes;
  while (!current.empty()) {
    std::set<Cube> next;
    std::set<Cube> merged;
    std::vector<Cube> cs(current.begin(), current.end());
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (std::size_t j = i + 1; j < cs.size(); ++j) {
        if (cs[i].care != cs[j].care) continue;
        const std::uint32_t diff = cs[i].value ^ cs[j].value;
        if (std::popcount(diff) != 1) continue;
        next.insert(Cube{cs[i].value & ~diff, cs[i].care & ~diff});
        merged.insert(cs[i]);
        merged.insert(cs[j]);
      }
    }
    for (const auto& c : cs)
      if (!merged.count(c)) primes.insert(c);
    current = std::move(next);
  }
  return {primes.begin(), primes.end()};
}

struct CoverCost {
  std::size_t cubes;
  int literals;
  friend auto operator<=>(const CoverCost&, const CoverCost&) = default;
};

}  // namespace detail

/// Two-level minimisation (Quine-McCluskey) of the function whose on-set is
/// `on`, treating `dont_care` minterms as free. Both vectors have 2^nvars
/// entries. Returns a minimum cover when the residual problem is small and a
/// greedy cover otherwise; the result is deterministic either way.
inline std::vector<Cube> minimize(int nvars, const std::vector<bool>& on, const std::vector<bool>& dont_care) {
  if (nvars > kMaxTruthTableVars) throw Error(ErrorKind::Usage, "minimize: too many variables");
  const std::size_t n = std::size_t{1} << nvars;
  std::vector<std::uint32_t> on_terms;
  std::vector<std::uint32_t> all_terms;
  for (std::uint32_t m = 0; m < n; ++m) {
    if (on[m]) on_terms.push_back(m);
    if (on[m] || dont_care[m]) all_terms.push_back(m);
  }
  if (on_terms.empty()) return {};

  auto primes = detail::prime_implicants(nvars, all_terms);
  std::stable_sort(primes.begin(), primes.end(), [](const Cube& a, const Cube& b) {
    return a.literal_count() < b.literal_count();
  });

  std::vector<Cube> chosen;
  std::vector<bool> covered(on_terms.size(), false);
  auto mark = [&](const Cube& c) {
    for (std::size_t i = 0; i < on_terms.size(); ++i)
      if (c.covers(on_terms[i])) covered[i] = true;
  };

  // Essential primes.
  for (std::size_t i = 0; i < on_terms.size(); ++i) {
    const Cube* only = nullptr;
    int count = 0;
    for (const auto& p : primes) {
      if (p.covers(on_terms[i])) {
        ++count;
        only = &p;
      }
    }
    if (count == 1 && std::find(chosen.begin(), chosen.end(), *only) == chosen.end()) {
      chosen.push_back(*only);
      mark(*only);
    }
  }

  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < on_terms.size(); ++i)
    if (!covered[i]) open.push_back(i);

  if (!open.empty()) {
    std::vector<Cube> useful;
    for (const auto& p : primes) {
      if (std::find(chosen.begin(), chosen.end(), p) != chosen.end()) continue;
      if (std::any_of(open.begin(), open.end(), [&](std::size_t i) { return p.covers(on_terms[i]); }))
        useful.push_back(p);
    }
    if (useful.size() <= 16) {
      std::uint32_t best_mask = 0;
      std::optional<detail::CoverCost> best;
      for (std::uint32_t mask = 1; mask < (1u << useful.size()); ++mask) {
        detail::CoverCost cost{static_cast<std::size_t>(std::popcount(mask)), 0};
        if (best && cost.cubes > best->cubes) continue;
        bool ok = std::all_of(open.begin(), open.end(), [&](std::size_t i) {
          for (std::size_t b = 0; b < useful.size(); ++b)
            if ((mask >> b & 1u) && useful[b].covers(on_terms[i])) return true;
          return false;
        });
        if (!ok) continue;
        for (std::size_t b = 0; b < useful.size(); ++b)
          if (mask >> b & 1u) cost.literals += useful[b].literal_count();
        if (!best || cost < *best) {
          best = cost;
          best_mask = mask;
        }
      }
      for (std::size_t b = 0; b < useful.size(); ++b)
        if (best_mask >> b & 1u) chosen.push_back(useful[b]);
    } else {
      while (!open.empty()) {
        std::size_t best_idx = 0, best_gain = 0;
        for (std::size_t b = 0; b < useful.size(); ++b) {
          std::size_t gain = 0;
          for (auto i : open)
            if (useful[b].covers(on_terms[i])) ++gain;
          if (gain > best_gain) {
            best_gain = gain;
            best_idx = b;
          }
        }
        chosen.push_back(useful[best_idx]);
        std::erase_if(open, [&](std::size_t i) { return useful[best_idx].covers(on_terms[i]); });
      }
    }
  }

  // Present cubes in variable order: positive literal, negative literal,
  // absent; earlier variables dominate.
  auto rank_key = [nvars](const Cube& c) {
    std::vector<int> key(static_cast<std::size_t>(nvars));
    for (int v = 0; v < nvars; ++v) {
      const bool present = c.care >> v & 1u;
      key[static_cast<std::size_t>(v)] = !present ? 2 : ((c.value >> v & 1u) ? 0 : 1);
    }
    return key;
  };
  std::sort(chosen.begin(), chosen.end(), [&](const Cube& a, const Cube& b) { return rank_key(a) < rank_key(b); });
  return chosen;
}

/// Renders a sum of products over `vars` (bit i of a cube is vars[i]).
inline Formula cubes_to_formula(const std::vector<Cube>& cubes, std::span<const Prop> vars) {
  if (cubes.empty()) return Formula::constant(false);
  std::vector<Formula> terms;
  for (const auto& c : cubes) {
    std::vector<Formula> lits;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      if (!(c.care >> v & 1u)) continue;
      auto a = Formula::atom(vars[v]);
      lits.push_back((c.value >> v & 1u) ? a : Formula::make_not(a));
    }
    if (lits.empty()) return Formula::constant(true);
    terms.push_back(lits.size() == 1 ? lits.front() : Formula::make(Op::And, std::move(lits)));
  }
  return terms.size() == 1 ? terms.front() : Formula::make(Op::Or, std::move(terms));
}

/// Evaluates a Boolean formula on minterm m, where bit i is the value of vars[i].
inline bool eval_minterm(const Formula& f, std::span<const Prop> vars, std::uint32_t m) {
  return eval_boolean(f, [&](PropId id) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].id == id) return (m >> i & 1u) != 0;
    throw Error(ErrorKind::Usage, "eval_minterm: proposition outside the variable set");
  });
}

}  // namespace apmdp

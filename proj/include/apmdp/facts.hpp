#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "apmdp/ltl.hpp"

namespace apmdp {

/// Logical background knowledge about a world: groups of mutually exclusive
/// propositions (optionally exactly-one) and containment implications such
/// as landmark => room => floor. The consistent full assignments ("models")
/// over the constrained propositions are enumerated once at construction.
class MutexFacts {
 public:
  struct Group {
    std::vector<PropId> members;
    bool exhaustive = false;
  };
  struct Implication {
    PropId antecedent;
    PropId consequent;
  };

  MutexFacts() = default;

  MutexFacts(std::vector<Group> groups, std::vector<Implication> implications)
      : groups_(std::move(groups)), implications_(std::move(implications)) {
    for (const auto& g : groups_)
      for (auto p : g.members) note_var(p);
    for (const auto& i : implications_) {
      note_var(i.antecedent);
      note_var(i.consequent);
    }
    enumerate_models();
  }

  const std::vector<Group>& groups() const noexcept { return groups_; }
  const std::vector<Implication>& implications() const noexcept { return implications_; }
  bool empty() const noexcept { return vars_.empty(); }

  bool constrains(PropId p) const noexcept { return p < constrained_.size() && constrained_[p]; }

  /// Each model lists, per constrained proposition (indexed by PropId), its
  /// truth value.
  const std::vector<std::vector<bool>>& models() const noexcept { return models_; }

  /// True iff the partial assignment (bit i of minterm is the value of
  /// vars[i]) extends to a model. Unconstrained propositions are free.
  bool consistent(std::span<const Prop> vars, std::uint32_t minterm) const {
    std::vector<std::pair<PropId, bool>> fixed;
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (constrains(vars[i].id)) fixed.emplace_back(vars[i].id, (minterm >> i & 1u) != 0);
    if (fixed.empty()) return true;
    return std::any_of(models_.begin(), models_.end(), [&](const std::vector<bool>& m) {
      return std::all_of(fixed.begin(), fixed.end(), [&](const auto& f) { return m[f.first] == f.second; });
    });
  }

 private:
  void note_var(PropId p) {
    if (p >= constrained_.size()) constrained_.resize(p + 1, false);
    if (!constrained_[p]) {
      constrained_[p] = true;
      vars_.push_back(p);
    }
  }

  // 0/1 = assigned, -1 = open.
  bool violated(const std::vector<int>& v) const {
    for (const auto& g : groups_) {
      int ones = 0;
      bool open = false;
      for (auto p : g.members) {
        if (v[p] == 1) ++ones;
        if (v[p] < 0) open = true;
      }
      if (ones > 1) return true;
      if (g.exhaustive && !open && ones == 0) return true;
    }
    for (const auto& i : implications_)
      if (v[i.antecedent] == 1 && v[i.consequent] == 0) return true;
    return false;
  }

  void enumerate_models() {
    models_.clear();
    if (vars_.empty()) return;
    std::vector<int> v(constrained_.size(), -1);
    search(v, 0);
  }

  void search(std::vector<int>& v, std::size_t depth) {
    if (depth == vars_.size()) {
      std::vector<bool> m(constrained_.size(), false);
      for (auto p : vars_) m[p] = v[p] == 1;
      models_.push_back(std::move(m));
      return;
    }
    const PropId p = vars_[depth];
    for (int value : {1, 0}) {
      v[p] = value;
      if (!violated(v)) search(v, depth + 1);
    }
    v[p] = -1;
  }

  std::vector<Group> groups_;
  std::vector<Implication> implications_;
  std::vector<PropId> vars_;
  std::vector<bool> constrained_;
  std::vector<std::vector<bool>> models_;
};

}  // namespace apmdp

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "apmdp/error.hpp"

namespace apmdp {

struct RewardParams {
  double gamma_goal = 100.0;
  double gamma_stay = -100.0;
  double gamma_step = -1.0;
  double discount = 0.95;
  double epsilon = 1e-4;
  std::size_t max_iters = 10000;

  void validate() const {
    if (!(gamma_goal > 0.0)) throw ConfigError("gamma_goal must be positive");
    if (!(gamma_step < 0.0)) throw ConfigError("gamma_step must be negative");
    if (!(gamma_stay < gamma_step)) throw ConfigError("gamma_stay must be below gamma_step");
    if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("discount must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (max_iters == 0) throw ConfigError("max_iters must be positive");
  }
};

struct Outcome {
  double prob = 1.0;
  std::size_t next = 0;
};

/// Finite MDP in compressed-row form. Rewards are collected on entering a
/// state; terminal states are absorbing with value zero. Actions of a state
/// keep the order in which they were added, which is also the tie-break order.
class TabularMdp {
 public:
  struct StateInfo {
    double entry_reward = 0.0;
    bool terminal = false;
    bool goal = false;
  };

  std::size_t add_state(double entry_reward, bool terminal, bool goal = false) {
    states_.push_back({entry_reward, terminal, goal});
    action_begin_.push_back(codes_.size());
    return states_.size() - 1;
  }

  /// Appends an action to the most recently added state.
  void add_action(std::size_t code, std::span<const Outcome> outcomes) {
    if (states_.empty()) throw Error(ErrorKind::Usage, "add_action before add_state");
    codes_.push_back(code);
    outcome_begin_.push_back(outcomes_.size());
    outcomes_.insert(outcomes_.end(), outcomes.begin(), outcomes.end());
  }
  void add_action(std::size_t code, std::size_t next) {
    const Outcome o{1.0, next};
    add_action(code, std::span<const Outcome>(&o, 1));
  }

  std::size_t size() const noexcept { return states_.size(); }
  const StateInfo& info(std::size_t s) const { return states_[s]; }

  std::size_t action_count(std::size_t s) const { return action_end(s) - action_begin_[s]; }
  std::size_t action_code(std::size_t s, std::size_t a) const { return codes_[action_begin_[s] + a]; }
  std::span<const Outcome> outcomes(std::size_t s, std::size_t a) const {
    const auto k = action_begin_[s] + a;
    const auto end = k + 1 < outcome_begin_.size() ? outcome_begin_[k + 1] : outcomes_.size();
    return {outcomes_.data() + outcome_begin_[k], end - outcome_begin_[k]};
  }

  double q_value(std::size_t s, std::size_t a, const std::vector<double>& v, double discount) const {
    double q = 0.0;
    for (const auto& o : outcomes(s, a)) {
      const auto& n = states_[o.next];
      q += o.prob * (n.entry_reward + (n.terminal ? 0.0 : discount * v[o.next]));
    }
    return q;
  }

 private:
  std::size_t action_end(std::size_t s) const {
    return s + 1 < action_begin_.size() ? action_begin_[s + 1] : codes_.size();
  }

  std::vector<StateInfo> states_;
  std::vector<std::size_t> action_begin_;
  std::vector<std::size_t> codes_;
  std::vector<std::size_t> outcome_begin_;
  std::vector<Outcome> outcomes_;
};

inline constexpr std::size_t kNoAction = std::numeric_limits<std::size_t>::max();

struct SolveResult {
  std::vector<double> values;
  std::vector<std::size_t> policy;  // action slot per state, kNoAction if none
  std::size_t backups = 0;
  std::size_t sweeps = 0;
  double residual = 0.0;
  double seconds = 0.0;
  bool converged = false;
};

/// Greedy action slot at s; ties keep the earliest slot.
inline std::size_t greedy_action(const TabularMdp& m, std::size_t s, const std::vector<double>& v, double discount) {
  std::size_t best = kNoAction;
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < m.action_count(s); ++a) {
    const double q = m.q_value(s, a, v, discount);
    if (q > best_q) {
      best_q = q;
      best = a;
    }
  }
  return best;
}

/// Synchronous (Jacobi) value iteration. One backup is one state update, and
/// every state is updated once per sweep.
inline SolveResult value_iteration(const TabularMdp& m, const RewardParams& p) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult r;
  const std::size_t n = m.size();
  r.values.assign(n, 0.0);
  std::vector<double> next(n, 0.0);
  while (n > 0 && r.sweeps < p.max_iters) {
    double residual = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double v = 0.0;
      if (!m.info(s).terminal && m.action_count(s) > 0) {
        v = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < m.action_count(s); ++a) v = std::max(v, m.q_value(s, a, r.values, p.discount));
      }
      next[s] = v;
      residual = std::max(residual, std::abs(v - r.values[s]));
    }
    r.values.swap(next);
    r.backups += n;
    ++r.sweeps;
    r.residual = residual;
    if (residual < p.epsilon) {
      r.converged = true;
      break;
    }
  }
  if (n == 0) r.converged = true;
  r.policy.assign(n, kNoAction);
  for (std::size_t s = 0; s < n; ++s)
    if (!m.info(s).terminal) r.policy[s] = greedy_action(m, s, r.values, p.discount);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

struct Rollout {
  std::vector<std::size_t> states;
  std::vector<std::size_t> actions;  // action codes
};

/// Follows the policy from `start` to a terminal goal state, taking the most
/// likely outcome of each action (the first on ties). Throws NoPlanError if a
/// non-goal terminal or a state without actions is reached, and
/// PlanDivergedError if a state repeats.
inline Rollout extract_plan(const TabularMdp& m, const SolveResult& r, std::size_t start) {
  Rollout out;
  std::vector<bool> seen(m.size(), false);
  std::size_t s = start;
  out.states.push_back(s);
  seen[s] = true;
  while (!m.info(s).terminal) {
    const auto a = r.policy[s];
    if (a == kNoAction) throw NoPlanError("state " + std::to_string(s) + " has no action");
    const auto outs = m.outcomes(s, a);
    std::size_t next = outs.front().next;
    double best = outs.front().prob;
    for (const auto& o : outs)
      if (o.prob > best) {
        best = o.prob;
        next = o.next;
      }
    out.actions.push_back(m.action_code(s, a));
    s = next;
    out.states.push_back(s);
    if (seen[s]) throw PlanDivergedError("state " + std::to_string(s) + " revisited");
    seen[s] = true;
  }
  if (!m.info(s).goal) throw NoPlanError("policy ends in a non-goal terminal state");
  return out;
}

}  // namespace apmdp

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "apmdp/error.hpp"

namespace apmdp {

using PropId = std::uint32_t;

/// Abstraction levels of the hierarchy. Landmarks are single cells.
inline constexpr int kCellLevel = 0;
inline constexpr int kRoomLevel = 1;
inline constexpr int kFloorLevel = 2;
inline constexpr int kLevelCount = 3;

struct Prop {
  std::string name;
  int level = kCellLevel;
  PropId id = 0;

  friend bool operator==(const Prop& a, const Prop& b) { return a.id == b.id && a.name == b.name; }
};

inline bool is_identifier(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

/// Ordered set of leveled atomic propositions. Ids are dense and follow
/// insertion order.
class PropRegistry {
 public:
  PropId add(const std::string& name, int level) {
    if (!is_identifier(name)) throw ConfigError("invalid proposition name '" + name + "'");
    if (level < 0 || level >= kLevelCount)
      throw ConfigError("proposition '" + name + "' has level " + std::to_string(level) +
                        " outside [0, " + std::to_string(kLevelCount - 1) + "]");
    if (index_.count(name)) throw ConfigError("duplicate proposition '" + name + "'");
    const auto id = static_cast<PropId>(props_.size());
    props_.push_back(Prop{name, level, id});
    index_.emplace(name, id);
    return id;
  }

  std::optional<PropId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const Prop& at(PropId id) const { return props_.at(id); }
  const Prop& operator[](PropId id) const { return props_[id]; }
  std::size_t size() const noexcept { return props_.size(); }
  const std::vector<Prop>& props() const noexcept { return props_; }
  static constexpr int level_count() noexcept { return kLevelCount; }

  std::vector<PropId> at_level(int level) const {
    std::vector<PropId> out;
    for (const auto& p : props_)
      if (p.level == level) out.push_back(p.id);
    return out;
  }

 private:
  std::vector<Prop> props_;
  std::unordered_map<std::string, PropId> index_;
};

enum class Op : std::uint8_t { True, False, Atom, Not, And, Or, Finally, Globally, Until, Release };

inline bool is_temporal(Op op) {
  return op == Op::Finally || op == Op::Globally || op == Op::Until || op == Op::Release;
}

/// Immutable LTL syntax tree with shared structure. Equality is structural and
/// uses a canonical key computed once at construction.
class Formula {
 public:
  Formula() : Formula(constant(true)) {}

  static Formula constant(bool value) {
    static const Formula t{make_node(Op::True, {}, {})};
    static const Formula f{make_node(Op::False, {}, {})};
    return value ? t : f;
  }
  static Formula atom(const Prop& p) { return Formula{make_node(Op::Atom, p, {})}; }

  /// Builds a node verbatim, without simplification.
  static Formula make(Op op, std::vector<Formula> children) {
    return Formula{make_node(op, {}, std::move(children))};
  }
  static Formula make_not(Formula a) { return make(Op::Not, {std::move(a)}); }
  static Formula make_and(Formula a, Formula b) { return make(Op::And, {std::move(a), std::move(b)}); }
  static Formula make_or(Formula a, Formula b) { return make(Op::Or, {std::move(a), std::move(b)}); }
  static Formula make_finally(Formula a) { return make(Op::Finally, {std::move(a)}); }
  static Formula make_globally(Formula a) { return make(Op::Globally, {std::move(a)}); }
  static Formula make_until(Formula a, Formula b) { return make(Op::Until, {std::move(a), std::move(b)}); }
  static Formula make_release(Formula a, Formula b) { return make(Op::Release, {std::move(a), std::move(b)}); }

  Op op() const noexcept { return node_->op; }
  const Prop& prop() const noexcept { return node_->prop; }
  const std::vector<Formula>& children() const noexcept { return node_->children; }
  const Formula& child(std::size_t i) const { return node_->children.at(i); }
  const std::string& key() const noexcept { return node_->key; }

  bool is_true() const noexcept { return op() == Op::True; }
  bool is_false() const noexcept { return op() == Op::False; }
  bool is_literal() const noexcept {
    return op() == Op::Atom || (op() == Op::Not && child(0).op() == Op::Atom);
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.node_ == b.node_ || a.key() == b.key();
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  friend bool operator<(const Formula& a, const Formula& b) { return a.key() < b.key(); }

 private:
  struct Node {
    Op op;
    Prop prop;
    std::vector<Formula> children;
    std::string key;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> make_node(Op op, Prop prop, std::vector<Formula> children) {
    static constexpr const char* tags[] = {"1", "0", "p", "!", "&", "|", "F", "G", "U", "R"};
    std::string key = tags[static_cast<int>(op)];
    if (op == Op::Atom) {
      key += std::to_string(prop.id) + ":" + prop.name;
    } else if (!children.empty()) {
      key += '(';
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) key += ',';
        key += children[i].key();
      }
      key += ')';
    }
    return std::make_shared<const Node>(Node{op, std::move(prop), std::move(children), std::move(key)});
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Simplifying constructors: flatten, absorb constants, deduplicate, sort.
// These define the canonical form used to merge automaton states.

namespace detail {

inline Formula junction(Op op, std::vector<Formula> parts) {
  const Op absorbing = op == Op::And ? Op::False : Op::True;
  const Op neutral = op == Op::And ? Op::True : Op::False;
  std::vector<Formula> flat;
  std::function<void(const Formula&)> add = [&](const Formula& f) {
    if (f.op() == op) {
      for (const auto& c : f.children()) add(c);
    } else {
      flat.push_back(f);
    }
  };
  for (const auto& p : parts) add(p);

  std::vector<Formula> kept;
  for (auto& f : flat) {
    if (f.op() == absorbing) return f;
    if (f.op() == neutral) continue;
    kept.push_back(std::move(f));
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  if (kept.empty()) return Formula::constant(op == Op::And);
  if (kept.size() == 1) return kept.front();
  return Formula::make(op, std::move(kept));
}

}  // namespace detail

inline Formula conj(std::vector<Formula> parts) { return detail::junction(Op::And, std::move(parts)); }
inline Formula disj(std::vector<Formula> parts) { return detail::junction(Op::Or, std::move(parts)); }
inline Formula conj(Formula a, Formula b) { return conj(std::vector<Formula>{std::move(a), std::move(b)}); }
inline Formula disj(Formula a, Formula b) { return disj(std::vector<Formula>{std::move(a), std::move(b)}); }

inline Formula negate_literal(const Formula& f) {
  if (f.is_true()) return Formula::constant(false);
  if (f.is_false()) return Formula::constant(true);
  if (f.op() == Op::Not) return f.child(0);
  return Formula::make_not(f);
}

// ---------------------------------------------------------------------------
// Printing in the concrete syntax accepted by the parser.

namespace detail {

inline int precedence(Op op) {
  switch (op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Until:
    case Op::Release: return 3;
    case Op::Not:
    case Op::Finally:
    case Op::Globally: return 4;
    default: return 5;
  }
}

inline void print(const Formula& f, std::string& out);

inline void print_child(const Formula& c, int min_prec, std::string& out) {
  if (precedence(c.op()) < min_prec) {
    out += '(';
    print(c, out);
    out += ')';
  } else {
    print(c, out);
  }
}

inline void print(const Formula& f, std::string& out) {
  const int p = precedence(f.op());
  switch (f.op()) {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Atom: out += f.prop().name; return;
    case Op::Not:
      out += '!';
      print_child(f.child(0), p, out);
      return;
    case Op::Finally:
    case Op::Globally:
      out += f.op() == Op::Finally ? "F " : "G ";
      print_child(f.child(0), p, out);
      return;
    case Op::And:
    case Op::Or: {
      // Left-associative: a right operand of the same precedence needs parens.
      const char* sep = f.op() == Op::And ? " & " : " | ";
      const auto& cs = f.children();
      for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) out += sep;
        const bool binary_right = cs.size() == 2 && i == 1;
        print_child(cs[i], binary_right ? p + 1 : p, out);
      }
      return;
    }
    case Op::Until:
    case Op::Release:
      // Right-associative.
      print_child(f.child(0), p + 1, out);
      out += f.op() == Op::Until ? " U " : " R ";
      print_child(f.child(1), p, out);
      return;
  }
}

}  // namespace detail

inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print(f, out);
  return out;
}

// ---------------------------------------------------------------------------

/// Pushes negations down to atoms. F/G and U/R are dualised; Release only
/// ever appears as a result of negating an Until.
inline Formula to_nnf(const Formula& f, bool negated = false) {
  switch (f.op()) {
    case Op::True:
    case Op::False: return negated ? Formula::constant(f.is_false()) : f;
    case Op::Atom: return negated ? Formula::make_not(f) : f;
    case Op::Not: return to_nnf(f.child(0), !negated);
    case Op::And:
    case Op::Or: {
      const bool conj_out = (f.op() == Op::And) != negated;
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(to_nnf(c, negated));
      return Formula::make(conj_out ? Op::And : Op::Or, std::move(cs));
    }
    case Op::Finally:
      return negated ? Formula::make_globally(to_nnf(f.child(0), true))
                     : Formula::make_finally(to_nnf(f.child(0), false));
    case Op::Globally:
      return negated ? Formula::make_finally(to_nnf(f.child(0), true))
                     : Formula::make_globally(to_nnf(f.child(0), false));
    case Op::Until:
      return negated ? Formula::make_release(to_nnf(f.child(0), true), to_nnf(f.child(1), true))
                     : Formula::make_until(to_nnf(f.child(0)), to_nnf(f.child(1)));
    case Op::Release:
      return negated ? Formula::make_until(to_nnf(f.child(0), true), to_nnf(f.child(1), true))
                     : Formula::make_release(to_nnf(f.child(0)), to_nnf(f.child(1)));
  }
  return f;
}

inline bool is_nnf(const Formula& f) {
  if (f.op() == Op::Not) return f.child(0).op() == Op::Atom;
  return std::all_of(f.children().begin(), f.children().end(), [](const Formula& c) { return is_nnf(c); });
}

inline void collect_atoms(const Formula& f, std::map<PropId, Prop>& out) {
  if (f.op() == Op::Atom) {
    out.emplace(f.prop().id, f.prop());
    return;
  }
  for (const auto& c : f.children()) collect_atoms(c, out);
}

/// Distinct propositions mentioned by f, ordered by id.
inline std::vector<Prop> atoms(const Formula& f) {
  std::map<PropId, Prop> m;
  collect_atoms(f, m);
  std::vector<Prop> out;
  out.reserve(m.size());
  for (auto& [_, p] : m) out.push_back(p);
  return out;
}

inline bool has_temporal(const Formula& f) {
  if (is_temporal(f.op())) return true;
  return std::any_of(f.children().begin(), f.children().end(), [](const Formula& c) { return has_temporal(c); });
}

/// Minimum abstraction level over the atoms of f.
inline int lowest_level(const Formula& f) {
  const auto ps = atoms(f);
  if (ps.empty()) throw Error(ErrorKind::Usage, "lowest_level: formula '" + to_string(f) + "' has no atoms");
  int lo = std::numeric_limits<int>::max();
  for (const auto& p : ps) lo = std::min(lo, p.level);
  return lo;
}

/// Evaluates a temporal-free formula under a truth assignment of its atoms.
template <class Truth>
bool eval_boolean(const Formula& f, const Truth& truth) {
  switch (f.op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return truth(f.prop().id);
    case Op::Not: return !eval_boolean(f.child(0), truth);
    case Op::And:
      return std::all_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return eval_boolean(c, truth); });
    case Op::Or:
      return std::any_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return eval_boolean(c, truth); });
    default:
      throw Error(ErrorKind::Usage, "eval_boolean: temporal operator in '" + to_string(f) + "'");
  }
}

}  // namespace apmdp

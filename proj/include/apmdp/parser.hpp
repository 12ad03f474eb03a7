#pragma once

#include <cctype>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "apmdp/error.hpp"
#include "apmdp/ltl.hpp"

namespace apmdp {

namespace detail {

// Grammar, loosest binding first:
//   or    := and ('|' and)*
//   and   := until ('&' until)*
//   until := unary ('U' until)?
//   unary := ('!' | 'F' | 'G') unary | primary
//   primary := ident | '(' or ')'
class LtlParser {
 public:
  using Resolver = std::function<Prop(std::size_t pos, const std::string& name)>;

  LtlParser(std::string_view text, Resolver resolve) : text_(text), resolve_(std::move(resolve)) {}

  Formula parse() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError(pos_, "empty formula");
    Formula f = parse_or();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (accept('|')) lhs = Formula::make_or(lhs, parse_and());
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_until();
    while (accept('&')) lhs = Formula::make_and(lhs, parse_until());
    return lhs;
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    if (accept('U')) return Formula::make_until(lhs, parse_until());
    return lhs;
  }

  Formula parse_unary() {
    if (accept('!')) return Formula::make_not(parse_unary());
    if (accept('F')) return Formula::make_finally(parse_unary());
    if (accept('G')) return Formula::make_globally(parse_unary());
    return parse_primary();
  }

  Formula parse_primary() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError(pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Formula inner = parse_or();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    if (c >= 'a' && c <= 'z') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::islower(static_cast<unsigned char>(text_[pos_])) ||
              std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      return Formula::atom(resolve_(start, std::string(text_.substr(start, pos_ - start))));
    }
    throw ParseError(pos_, std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  Resolver resolve_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a formula whose atoms must all be declared in the registry.
inline Formula parse(std::string_view text, const PropRegistry& registry) {
  detail::LtlParser p(text, [&](std::size_t pos, const std::string& name) {
    auto id = registry.find(name);
    if (!id) throw UnknownPropositionError(pos, name);
    return registry[*id];
  });
  return p.parse();
}

/// Parses a formula, declaring unknown identifiers at level 0 in order of
/// first appearance. Used where no world is available (e.g. translating a
/// formula over abstract propositions).
inline Formula parse_declaring(std::string_view text, PropRegistry& registry) {
  detail::LtlParser p(text, [&](std::size_t, const std::string& name) {
    auto id = registry.find(name);
    return registry[id ? *id : registry.add(name, kCellLevel)];
  });
  return p.parse();
}

/// Reads a task file: one formula per line, '#' starts a comment, blank lines
/// are skipped.
inline std::vector<std::string> split_formula_lines(std::string_view content) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string line(content.substr(start, end - start));
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string::npos) {
      const auto last = line.find_last_not_of(" \t\r");
      out.push_back(line.substr(first, last - first + 1));
    }
    start = end + 1;
  }
  return out;
}

}  // namespace apmdp

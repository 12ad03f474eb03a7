#pragma once

#include <stdexcept>
#include <string>

namespace apmdp {

enum class ErrorKind {
  Parse,
  UnknownProposition,
  UnsupportedFragment,
  Infeasible,
  Config,
  Grounding,
  Usage,
};

/// Base exception for every recoverable failure in the library. The kind is
/// what callers (the CLI in particular) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : Error(ErrorKind::Parse,
              "parse error at position " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownPropositionError : public Error {
 public:
  UnknownPropositionError(std::size_t position, const std::string& name)
      : Error(ErrorKind::UnknownProposition,
              "unknown proposition '" + name + "' at position " + std::to_string(position)),
        name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnsupportedFragmentError : public Error {
 public:
  explicit UnsupportedFragmentError(const std::string& what)
      : Error(ErrorKind::UnsupportedFragment, "unsupported fragment: " + what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::Infeasible, what) {}
};

/// The greedy policy does not reach a goal from the requested start.
class NoPlanError : public InfeasibleError {
 public:
  explicit NoPlanError(const std::string& what) : InfeasibleError("no plan: " + what) {}
};

/// Rolling the policy forward revisits a state.
class PlanDivergedError : public InfeasibleError {
 public:
  explicit PlanDivergedError(const std::string& what) : InfeasibleError("plan diverged: " + what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class GroundingError : public Error {
 public:
  explicit GroundingError(const std::string& what) : Error(ErrorKind::Grounding, what) {}
};

}  // namespace apmdp

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pdpomdp {

enum class ErrorKind {
  DistributionSum,
  UnknownIdentifier,
  DuplicateIdentifier,
  DuplicateEdge,
  NonPositiveProbability,
  MissingTransition,
  DuplicateTransition,
  InvalidInitialBelief,
  EmptyTargets,
  ZeroObservationProbability,
  EmptyResult,
  Syntax,
  NodeBudgetExceeded,
  NotPosteriorDeterministic,
  NotNormalized,
  TooManyStates,
  EmptyDomain,
  DisjointDomains,
  NotInAnySec,
  NoExit,
  NotFinite,
  InvalidArgument,
  Internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Issue {
  ErrorKind kind;
  std::string message;
};

/// Thrown by model validation; carries every violated constraint.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues);

  const std::vector<Issue>& issues() const noexcept { return issues_; }
  bool has(ErrorKind kind) const;

 private:
  std::vector<Issue> issues_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& what);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace pdpomdp

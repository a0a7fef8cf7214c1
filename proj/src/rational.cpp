#include "pdpomdp/rational.hpp"
#include "pdpomdp/error.hpp"

#include <mpfr.h>

#include <cctype>
#include <memory>

namespace pdpomdp {

namespace {

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (num.empty() || den.empty() || !all_digits(num) || !all_digits(den)) return std::nullopt;
    Integer d(std::string(den), 10);
    if (d == 0) return std::nullopt;
    Rational r(Integer(std::string(num), 10), d);
    r.canonicalize();
    return r;
  }
  auto dot = text.find('.');
  auto whole = text.substr(0, dot);
  auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;
  if (whole.empty() && frac.empty()) return std::nullopt;
  std::string digits = std::string(whole) + std::string(frac);
  Integer num(digits.empty() ? std::string("0") : digits, 10);
  Integer den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::string exact_string(const Rational& raw) {
  Rational value = raw;
  value.canonicalize();
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string decimal_string(const Rational& value, int significant) {
  mpfr_t x;
  mpfr_init2(x, 256);
  mpfr_set_q(x, value.get_mpq_t(), MPFR_RNDN);
  char* buffer = nullptr;
  mpfr_asprintf(&buffer, "%.*Rg", significant, x);
  std::string out(buffer);
  mpfr_free_str(buffer);
  mpfr_clear(x);
  return out;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DistributionSum: return "DistributionSum";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::DuplicateIdentifier: return "DuplicateIdentifier";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::NonPositiveProbability: return "NonPositiveProbability";
    case ErrorKind::MissingTransition: return "MissingTransition";
    case ErrorKind::DuplicateTransition: return "DuplicateTransition";
    case ErrorKind::InvalidInitialBelief: return "InvalidInitialBelief";
    case ErrorKind::EmptyTargets: return "EmptyTargets";
    case ErrorKind::ZeroObservationProbability: return "ZeroObservationProbability";
    case ErrorKind::EmptyResult: return "EmptyResult";
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::NodeBudgetExceeded: return "NodeBudgetExceeded";
    case ErrorKind::NotPosteriorDeterministic: return "NotPosteriorDeterministic";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::TooManyStates: return "TooManyStates";
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::DisjointDomains: return "DisjointDomains";
    case ErrorKind::NotInAnySec: return "NotInAnySec";
    case ErrorKind::NoExit: return "NoExit";
    case ErrorKind::NotFinite: return "NotFinite";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

namespace {

std::string join_issues(const std::vector<Issue>& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += issue.message;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(issues.empty() ? ErrorKind::Internal : issues.front().kind, join_issues(issues)),
      issues_(std::move(issues)) {}

bool ValidationError::has(ErrorKind kind) const {
  for (const auto& issue : issues_) {
    if (issue.kind == kind) return true;
  }
  return false;
}

SyntaxError::SyntaxError(std::size_t line, std::size_t column, const std::string& what)
    : Error(ErrorKind::Syntax,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

}  // namespace pdpomdp

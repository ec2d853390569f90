#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input or violated preconditions.
struct ValidationError : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };
struct CandidateExhausted : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct RoutingFailed : Error { using Error::Error; };
struct Inconclusive : Error { using Error::Error; };
struct DomainViolation : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct StepUnderflow : Error { using Error::Error; };
struct MissingPrimitive : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

struct HypothesisViolated : Error {
  HypothesisViolated(const std::string& what, std::string which)
      : Error(what), hypothesis(std::move(which)) {}
  std::string hypothesis;
};

struct GiveUp : Error {
  GiveUp(const std::string& what, std::string last)
      : Error(what), failing_hypothesis(std::move(last)) {}
  std::string failing_hypothesis;
};

}  // namespace bergman

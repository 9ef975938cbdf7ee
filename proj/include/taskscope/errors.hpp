#pragma once

#include <stdexcept>
#include <string>

namespace taskscope {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input text/JSON could not be parsed.
struct ParseError : Error {
  using Error::Error;
};

// A structurally parsed world failed invariant validation.
struct ValidationError : Error {
  using Error::Error;
};

struct UnknownIdError : Error {
  using Error::Error;
};

struct UnknownClassError : Error {
  using Error::Error;
};

struct TaxonomyError : Error {
  using Error::Error;
};

// Oracle reply failed the wire grammar after the retry budget.
struct OracleFormatError : Error {
  using Error::Error;
};

// Network / HTTP failure talking to a remote oracle.
struct OracleTransportError : Error {
  using Error::Error;
};

// Action applied to a state where its preconditions do not hold.
struct NotApplicableError : Error {
  using Error::Error;
};

// Reduction selected nothing beyond the mandatory retentions.
struct EmptySelectionError : Error {
  using Error::Error;
};

// Task composition could not find disjoint satisfiable subgoals.
struct InfeasibleError : Error {
  using Error::Error;
};

// Exhaustive search ran out of state space without reaching the goal.
struct UnsolvableError : Error {
  using Error::Error;
};

}  // namespace taskscope

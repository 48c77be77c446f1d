#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace matjet {

/// Invalid textual input: grammar violations, bad variable indices,
/// malformed JSON shapes.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " +
                           std::to_string(position) + ")"),
        position_(position) {}
  explicit ParseError(const std::string& message)
      : std::runtime_error(message), position_(0) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Evaluation left the domain of a partial function node
/// (log of a non-positive value, sqrt of a negative, division by zero).
class DomainError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mismatched shapes: jet generator count or order, matrix sizes, arity.
class ShapeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input data violating the commuting / real-spectrum hypotheses.
class HypothesisError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: eigensolver failure, clustering ambiguity,
/// rank deficiency of a block basis.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace matjet

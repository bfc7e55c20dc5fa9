#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace resedf {

//! Raised when no complete case falls inside any admissible smoothing window,
//! or when an estimator is called on a dataset without complete cases.
class InsufficientDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! All kernel weights in a weighted least-squares problem are zero.
class EmptyWindowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! E[e^4] - E[e^3]^2 - 1 <= 0.
class DegenerateMomentsError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class QuadratureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Malformed input file or config; `line()` is 1-based, 0 when not tied to a line.
class DataFormatError : public std::runtime_error {
public:
  DataFormatError(const std::string& what, std::size_t line = 0)
    : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what)
    , line_(line)
  {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

} // namespace resedf

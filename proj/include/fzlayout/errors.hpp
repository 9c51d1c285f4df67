#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fzlayout {

/// Malformed edge-list input. Carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Well-formed input with invalid values (non-positive weights, size mismatches).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Structural precondition violated (disconnected graph, empty graph).
class GraphError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input file could not be opened or read.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid force/optimizer/pipeline configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A NaN or infinity showed up during optimization.
class NumericError : public std::runtime_error {
public:
  NumericError(long iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

private:
  long iteration_;
};

}  // namespace fzlayout

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnmf {

// Base for every error raised by the library. The CLI maps `kind()` onto
// its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

// Malformed text input. `line()` is 1-based; 0 means "not line-specific".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "parse"; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a domain invariant (self-loop, bad weight,
// duplicate or missing node, length mismatch).
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

// Out-of-range configuration or generator parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parameter"; }
};

// A metric that is undefined on its input (e.g. modularity of an edgeless graph).
class MetricError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "metric"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

// Non-finite energy during a fit. Carries the iteration index and, when raised
// from a multi-run experiment, the seed of the failing run.
class NumericalError : public Error {
 public:
  NumericalError(std::size_t iteration, const std::string& what)
      : Error(what), iteration_(iteration) {}
  NumericalError(std::size_t iteration, unsigned long long seed, const std::string& what)
      : Error(what), iteration_(iteration), seed_(seed), has_seed_(true) {}

  std::size_t iteration() const noexcept { return iteration_; }
  bool has_seed() const noexcept { return has_seed_; }
  unsigned long long seed() const noexcept { return seed_; }
  const char* kind() const noexcept override { return "numerical"; }

 private:
  std::size_t iteration_;
  unsigned long long seed_ = 0;
  bool has_seed_ = false;
};

}  // namespace bnmf

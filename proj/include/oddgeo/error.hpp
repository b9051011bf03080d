#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace oddgeo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text; `offset` is the byte position of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownSymbolError : public Error {
 public:
  explicit UnknownSymbolError(const std::string& symbol)
      : Error("unknown identifier '" + symbol + "'"), symbol_(symbol) {}
  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

/// Evaluation left the domain of an expression (division by zero, sqrt of a
/// negative number). Carries the coordinates of the offending point when known.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, std::vector<double> point = {})
      : Error(what), point_(std::move(point)) {}
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

/// Degree or shape mismatch between tensor arguments.
class DegreeError : public Error {
 public:
  using Error::Error;
};

/// A structure failed one of its defining invariants (rank, nonvanishing,
/// regularity, invertibility of a pointwise system).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Invalid user input: scenario files, CLI flags, sampler configuration.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace oddgeo

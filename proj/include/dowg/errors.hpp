#pragma once

#include <stdexcept>
#include <string>

namespace dowg {

/// Inconsistent mesh topology, e.g. an interior edge without its second side.
class TopologyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A linear or outer iteration failed to converge.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A configuration that is well-formed but not admissible.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed command line or config file.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dowg

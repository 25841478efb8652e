#pragma once

#include <stdexcept>
#include <string>

namespace nkg {

enum class ErrorKind {
  Domain,
  DegenerateBlock,
  NoConvergence,
  OutOfRange,
  NoBlocks,
  NonPositiveDenominator,
  InvalidConfig,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every recoverable failure in the library is reported as an Error carrying
/// a kind, so callers (the CLI, the Monte Carlo harness) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nkg

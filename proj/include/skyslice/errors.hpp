#pragma once

#include <stdexcept>
#include <string>

namespace skyslice {

/// Invalid or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometry for which an angle or rate is undefined (coincident points).
class DegenerateGeometry : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace skyslice

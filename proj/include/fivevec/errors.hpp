#pragma once

#include <stdexcept>
#include <string>

namespace fivevec {

/// Caller broke a documented precondition (wrong frame kind, mismatched
/// anchors, non-rigid state where a rigid one is required, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Input data does not satisfy a type invariant (asymmetric bivector,
/// non-isometric motion, non-positive mass, ...).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Tensor slots or array extents are incompatible.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Operation only defined for a particular base dimension.
class UnsupportedDimension : public std::invalid_argument {
 public:
  explicit UnsupportedDimension(const std::string& what) : std::invalid_argument(what) {}
};

/// Bad configuration: unknown preset, singular metric, malformed document.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fivevec

#pragma once

#include <stdexcept>
#include <string>

namespace ancova_cp {

/// XᵀX is not positive definite (e.g. a treatment whose covariate is constant).
class SingularDesign : public std::runtime_error {
 public:
  explicit SingularDesign(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix that must be inverted is numerically singular, or a conditional
/// variance came out non-positive.
class ConditioningFailure : public std::runtime_error {
 public:
  explicit ConditioningFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid probability level, degrees of freedom or statistic argument.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Fewer than two sub-threshold grid points fell in one of the low-CP clusters.
class InsufficientLowCPPoints : public std::runtime_error {
 public:
  explicit InsufficientLowCPPoints(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed layout or configuration file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ancova_cp

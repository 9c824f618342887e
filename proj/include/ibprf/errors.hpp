#pragma once

#include <stdexcept>

namespace ibprf {

/// Invalid experiment or scheme parameters (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Setup-server misuse: unknown or duplicate node ids.
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form evaluated outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A protocol message failed authentication or parsing.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mobility event the deployment does not allow (leaving the region or the home cell).
class MoveRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant of the simulation was violated (CLI exit code 3).
class IntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Two algebraic routes to the same closed form disagreed.
class FormulaIntegrityError : public IntegrityError {
 public:
  using IntegrityError::IntegrityError;
};

}  // namespace ibprf

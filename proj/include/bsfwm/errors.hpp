#pragma once

#include <stdexcept>
#include <string>

namespace bsfwm {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An evaluation was requested outside the validity window of a model.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The empirical mode reconstruction produced an unphysical intermediate.
class ModelBreakdownError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Invalid user input: malformed data files, bad grids, inconsistent setups.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A root or extremum that the caller required does not exist in the window.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace bsfwm

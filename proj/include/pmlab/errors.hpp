#pragma once

#include <stdexcept>
#include <string>

namespace pmlab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public Error {
  using Error::Error;
};

class DomainError : public Error {
  using Error::Error;
};

class NumericError : public Error {
  using Error::Error;
};

class HypothesisError : public Error {
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class TrackingError : public Error {
  using Error::Error;
};

class SelectionError : public Error {
  using Error::Error;
};

class ConeError : public Error {
  using Error::Error;
};

class DegeneracyError : public Error {
  using Error::Error;
};

class FileError : public Error {
  using Error::Error;
};

}  // namespace pmlab

#pragma once

#include <stdexcept>
#include <string>

namespace robscatter {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class SingularSubset : public Error {
 public:
  using Error::Error;
};

// The data cannot support the estimator (e.g. every row on one hyperplane).
class DegenerateData : public Error {
 public:
  using Error::Error;
};

class ZeroScale : public Error {
 public:
  explicit ZeroScale(const std::string& what, int column = -1)
      : Error(what), column_(column) {}
  int column() const noexcept { return column_; }

 private:
  int column_;
};

class TooFewInliers : public Error {
 public:
  using Error::Error;
};

class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

// Invalid estimator or CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (CSV parse failures, non-finite cells).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace robscatter

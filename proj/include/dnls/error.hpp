#pragma once

#include <stdexcept>
#include <string>

namespace dnls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
public:
  using Error::Error;
};

class PeriodMismatch : public Error {
public:
  using Error::Error;
};

class InvalidExponent : public Error {
public:
  using Error::Error;
};

class EmptyCoefficients : public Error {
public:
  using Error::Error;
};

class SingularShift : public Error {
public:
  using Error::Error;
};

/// The radius scan ran out of budget before |g| dropped below c|z|^3.
class NoThresholdFound : public Error {
public:
  using Error::Error;
};

class MissingDerivative : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class DimensionTooLarge : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace dnls

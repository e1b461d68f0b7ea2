#pragma once

#include <stdexcept>
#include <string>

namespace rissim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input to a library call (precondition violated).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rissim

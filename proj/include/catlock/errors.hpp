#pragma once

#include <stdexcept>
#include <string>

namespace catlock {

// Invalid configuration or out-of-range construction parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// API misuse, e.g. applying an operator to a state of the wrong dimension.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A trajectory could not be continued (non-finite amplitudes, truncation overflow).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reading or writing a record file failed, or its schema is not supported.
class RecordIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace catlock

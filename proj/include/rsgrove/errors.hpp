#pragma once

#include <stdexcept>
#include <string>

namespace rsgrove {

// Bad input data: malformed files, invalid partition sizes, inconsistent
// dimensionality between artifacts.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters supplied by the caller (ranges, missing options).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A guarantee of the algorithm did not hold. Always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define RSGROVE_ENSURE(cond, msg)                                            \
  do {                                                                       \
    if (!(cond)) {                                                           \
      throw ::rsgrove::InternalError(std::string("assertion failed: ") +     \
                                     #cond + ": " + (msg));                  \
    }                                                                        \
  } while (0)

}  // namespace rsgrove

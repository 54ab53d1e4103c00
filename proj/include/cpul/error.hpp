#pragma once

#include <stdexcept>
#include <string>

namespace cpul {

// Raised on contract violations (bad inputs, infeasible data, invalid
// configuration). Messages are stable and tested verbatim where the
// surrounding docs quote them.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Usage errors map to exit code 2 in the CLI; everything else to 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace cpul

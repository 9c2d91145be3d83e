#pragma once

#include <stdexcept>
#include <string>

namespace pwfwi {

// Invalid user input: malformed files, out-of-range parameters, schema
// violations.  The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown: singular systems, solver residuals above tolerance,
// non-finite values.  The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pwfwi

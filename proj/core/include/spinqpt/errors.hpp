#pragma once

#include <stdexcept>
#include <string>

namespace spinqpt {

// Base class for all library errors. The CLI maps the subclasses to exit
// codes: ConfigError -> 2, NumericalError -> 3, IoError -> 4.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid user input: bad model name, out-of-range N, malformed config, ...
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// A numerical routine failed to meet its contract (non-convergence,
// eigenvalue far outside its allowed range, vanished bisection jump, ...).
class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Filesystem problems: unwritable output path, unreadable sweep file,
// schema mismatch in an input file.
class IoError : public Error {
public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace spinqpt

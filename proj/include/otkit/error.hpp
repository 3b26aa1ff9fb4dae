#pragma once

#include <stdexcept>
#include <string>

namespace otkit {

// Invalid user input: malformed files, bad parameters, shape mismatches.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure could not produce a finite result.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace otkit

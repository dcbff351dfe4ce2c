#pragma once

#include <stdexcept>
#include <string>

namespace cospec {

// Malformed input or violated precondition. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured resource limit (vertex cap, window, count width) was hit.
// The CLI maps this to exit code 3.
class ResourceCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ball generation stopped before reaching the requested radius.
class PartialBallError : public ResourceCapError {
 public:
  PartialBallError(const std::string& what, int attained_radius)
      : ResourceCapError(what), attained_radius_(attained_radius) {}

  int attained_radius() const noexcept { return attained_radius_; }

 private:
  int attained_radius_;
};

// A wreath coset left the materialized window [-W, W].
class WindowExceededError : public ResourceCapError {
 public:
  using ResourceCapError::ResourceCapError;
};

}  // namespace cospec

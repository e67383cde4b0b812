#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rnloc {

// Bad run configuration (unknown node id in a fault spec, malformed config file, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Random network generation exhausted its retry budget. The message names the
// predicate that kept failing (connectivity / anchor coverage).
class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

// A stacked point violated its ball constraints where a feasible one was required.
class FeasibilityError : public std::runtime_error {
 public:
  explicit FeasibilityError(const std::string& what) : std::runtime_error(what) {}
};

// A solver produced a non-finite cost. Carries the iteration at which it happened.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace rnloc

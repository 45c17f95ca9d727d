#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlnoether {

/// Operation requested in a dimension where it is not defined (e.g. angular
/// quantities on a 1D rod).
class UnsupportedDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Scenario configuration failed validation. `key()` is the dotted path of the
/// offending entry, e.g. "kernel.family".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Time integration produced non-finite values.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(std::size_t step)
      : std::runtime_error("solver diverged: non-finite state at step " + std::to_string(step)),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace nlnoether

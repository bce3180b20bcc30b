#pragma once

#include <stdexcept>
#include <string>

namespace finco {

/// Raised when a run configuration cannot be parsed or validated. The message
/// carries the offending key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// No sample survived filtering, so there is nothing to superpose.
class EmptyReconstruction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton search from every seed failed to converge.
class NoRoots : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace finco

#pragma once

#include <stdexcept>
#include <string>

namespace ranslice {

/// Invalid configuration value. `path` names the offending field
/// (e.g. "incumbent.p_i") when one is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string path = {})
      : std::runtime_error(path.empty() ? what : path + ": " + what),
        path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// A grant was attempted that does not fit the pool. Allocators pre-check
/// feasibility, so this always indicates a caller bug.
class CapacityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ranslice

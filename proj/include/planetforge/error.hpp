#pragma once

#include <stdexcept>
#include <string>

namespace planetforge {

// Precondition violated by a caller-supplied value.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or out-of-range configuration. `path` is the JSON location.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : InvalidArgument(path.empty() ? what : path + ": " + what), path_(path) {}

  // JSON path of the offending field, e.g. "planet.elevation_noise.octaves".
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Sample coordinate outside the addressable domain.
class OutOfDomain : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Unreadable or malformed file. `field()` names the offending part.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// An internal invariant failed; signals a bug upstream of the detecting stage.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace planetforge

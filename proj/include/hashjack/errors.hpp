#pragma once

#include <stdexcept>
#include <string>

namespace hashjack {

// Error taxonomy maps onto CLI exit codes: ConfigError -> 1,
// InputError -> 2, AnalysisError -> 3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

class AnalysisError : public std::runtime_error {
 public:
  explicit AnalysisError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hashjack

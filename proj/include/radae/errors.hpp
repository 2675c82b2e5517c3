#pragma once

#include <stdexcept>
#include <string>

namespace radae {

/// A caller broke an operation's contract (dimensions, indices, empty inputs).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A configuration value is missing, malformed or out of range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radae

#pragma once

#include <stdexcept>
#include <string>

namespace cfocrt {

// Raised when a computation cannot proceed on otherwise well-formed input
// (undefined correlation phase, no feasible configuration, ...).
// The CLI maps this to exit code 1; std::invalid_argument maps to exit 2.
class infeasible_error : public std::runtime_error {
 public:
  explicit infeasible_error(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

}  // namespace cfocrt

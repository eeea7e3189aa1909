#pragma once

#include <stdexcept>
#include <string>

namespace specext {

/// Moment data (or an evaluation point) violates a feasibility requirement,
/// e.g. c_0 <= 0, a negative spectrum, or Q <= 0 on the grid.
class infeasible_error : public std::runtime_error {
 public:
  explicit infeasible_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace specext

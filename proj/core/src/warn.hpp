#pragma once

#include <iostream>
#include <string_view>

namespace specext::detail {

inline void warn(std::string_view message) {
  std::cerr << "[specext warning] " << message << "\n";
}

}  // namespace specext::detail

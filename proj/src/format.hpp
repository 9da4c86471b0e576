#pragma once

#include <array>
#include <cstdio>
#include <string>

namespace entrans {

// Fixed 17-significant-digit formatting used by every text output.
inline std::string fmt17(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

}  // namespace entrans

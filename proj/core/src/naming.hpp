#pragma once

#include <string>

namespace resq::detail {

inline void append_index(std::string&) {}

template <typename T, typename... Rest>
void append_index(std::string& out, T first, Rest... rest) {
  if (out.back() != '[') out += ',';
  out += std::to_string(first);
  append_index(out, rest...);
}

/// key("pd", 2, 5) == "pd[2,5]"
template <typename... Idx>
std::string key(const char* base, Idx... idx) {
  std::string out(base);
  out += '[';
  append_index(out, idx...);
  out += ']';
  return out;
}

}  // namespace resq::detail

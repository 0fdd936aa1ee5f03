#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "resq/assemble.hpp"
#include "resq/scenario.hpp"

namespace resq::test {

inline std::filesystem::path data_file(const std::string& name) { return std::filesystem::path(RESQ_DATA_DIR) / name; }

inline Scenario reference_with_soc_dep(double soc_dep) {
  Scenario s = load_scenario(data_file("reference.json"));
  for (auto& g : s.ev_groups) g.soc_dep = soc_dep;
  return s;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("resq_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace resq::test

#pragma once

#include <filesystem>
#include <string>

namespace sobext::testing {

inline std::filesystem::path fixture_dir() { return SOBEXT_FIXTURE_DIR; }

/// Fresh empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sobext_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace sobext::testing

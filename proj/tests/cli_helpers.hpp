// Helpers for driving the built CLI binary from tests.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace cli {

inline std::string binary_path() { return CROWDGAME_CLI_PATH; }
inline std::string config_dir() { return CROWDGAME_CONFIG_DIR; }

// Runs the CLI with the given arguments; stdout/stderr go to the given files
// (empty = /dev/null). Returns the process exit status.
inline int run(const std::string& args, const std::string& stdout_path = "",
               const std::string& stderr_path = "") {
  std::string cmd = binary_path() + " " + args;
  cmd += " >" + (stdout_path.empty() ? std::string("/dev/null") : stdout_path);
  cmd += " 2>" + (stderr_path.empty() ? std::string("/dev/null") : stderr_path);
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

inline std::string write_temp(const std::string& stem, const std::string& text) {
  const std::string path = temp_path(stem);
  std::ofstream f(path, std::ios::binary);
  f << text;
  return path;
}

}  // namespace cli

#ifndef FREEPROD_TOOLS_CONFIG_HPP
#define FREEPROD_TOOLS_CONFIG_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "freeprod/error.hpp"
#include "json.hpp"

namespace freeprod::cli {

// Documented exit codes.
enum ExitCode : int {
  exit_pass = 0,
  exit_check_failed = 1,
  exit_usage = 2,
  exit_math_domain = 3,
  exit_backend = 4,
  exit_solver_coverage = 5,
};

int exit_code_for(ErrorCode code);

// 15 significant digits, '.' separator regardless of locale.
std::string format_number(double x);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void close();

 private:
  std::string buffer_;
  std::filesystem::path path_;
  std::size_t columns_;
};

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

// Thrown for a failed acceptance flag or coverage check; carries the exit code.
struct CommandFailure {
  int code;
  std::string message;
};

}  // namespace freeprod::cli

#endif  // FREEPROD_TOOLS_CONFIG_HPP

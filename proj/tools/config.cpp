#include "config.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace freeprod::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::unknown_catalog_entry:
    case ErrorCode::kind_mismatch:
      return exit_usage;
    case ErrorCode::backend_failure:
      return exit_backend;
    default:
      return exit_math_domain;
  }
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 15);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) buffer_ += (k ? "," : "") + header[k];
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("csv row width");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) buffer_ += ',';
    buffer_ += format_number(values[k]);
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  std::ofstream out(path_, std::ios::binary);
  out << buffer_;
  if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path_.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  std::ofstream out(path, std::ios::binary);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string());
}

}  // namespace freeprod::cli

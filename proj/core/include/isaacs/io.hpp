#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace isaacs {

/// Shortest decimal representation that round-trips to the same double
/// (std::to_chars general form). Used for all numeric text artifacts so
/// reruns are byte-identical.
std::string format_double(double v);

/// Writes content to a temporary sibling file and renames it over `path`
/// (atomic on POSIX filesystems): readers never observe partial artifacts.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Minimal CSV accumulator: header once, then rows of preformatted cells.
struct CsvBuilder {
  explicit CsvBuilder(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;

  std::size_t columns;
  std::string body;
};

std::string cell(double v);
std::string cell(std::int64_t v);
std::string cell(std::size_t v);
std::string cell(const std::string& v);

}  // namespace isaacs

#pragma once

#include <string>
#include <vector>

namespace minqds {

/// Plain CSV with a header row; numbers are written with 17 significant
/// digits, '.' decimal separator, no locale.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string to_string() const;
};

std::string csv_number(double v);

/// Write-temp-then-rename so readers never observe partial files.
void atomic_write_file(const std::string& path, const std::string& content);

void ensure_directory(const std::string& path);

}  // namespace minqds

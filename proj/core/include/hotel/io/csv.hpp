#pragma once

// Plain CSV output with round-trip number formatting, so identical runs
// produce identical bytes.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace hotel::io {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);
  /// Row whose first cell is text (labels, method names).
  void row(const std::string& label, const std::vector<double>& values);

 private:
  std::ofstream os_;
  std::size_t columns_;
  std::filesystem::path path_;
};

}  // namespace hotel::io

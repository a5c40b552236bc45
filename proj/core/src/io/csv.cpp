#include "hotel/io/csv.hpp"

#include <charconv>
#include <cmath>

#include "hotel/error.hpp"

namespace hotel::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : os_(path, std::ios::trunc), columns_(header.size()), path_(path) {
  if (!os_) throw Error("cannot write " + path.string());
  for (std::size_t k = 0; k < header.size(); ++k) os_ << (k ? "," : "") << header[k];
  os_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw DomainError("CSV row width differs from the header in " + path_.string());
  for (std::size_t k = 0; k < values.size(); ++k) os_ << (k ? "," : "") << format_number(values[k]);
  os_ << '\n';
}

void CsvWriter::row(const std::string& label, const std::vector<double>& values) {
  if (values.size() + 1 != columns_) throw DomainError("CSV row width differs from the header in " + path_.string());
  os_ << label;
  for (double v : values) os_ << ',' << format_number(v);
  os_ << '\n';
}

}  // namespace hotel::io

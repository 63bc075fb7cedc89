#include "esk/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace esk {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, uint64_t config_hash,
                     const std::vector<std::string>& header)
    : os_(path), columns_(header.size()) {
  if (!os_) throw std::runtime_error("csv: cannot open " + path);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash));
  os_ << "# config_hash=" << buf << "\n";
  for (size_t i = 0; i < header.size(); ++i)
    os_ << header[i] << (i + 1 == header.size() ? "\n" : ",");
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::invalid_argument("csv: column count mismatch");
  for (size_t i = 0; i < values.size(); ++i)
    os_ << format_double(values[i]) << (i + 1 == values.size() ? "\n" : ",");
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("csv: column count mismatch");
  for (size_t i = 0; i < cells.size(); ++i)
    os_ << cells[i] << (i + 1 == cells.size() ? "\n" : ",");
}

}  // namespace esk

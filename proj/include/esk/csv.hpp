#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace esk {

// CSV files open with a config-hash comment line, then the header row.
// Doubles are printed with %.17g so equal values serialize identically.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, uint64_t config_hash,
            const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::ofstream os_;
  size_t columns_;
};

std::string format_double(double x);

}  // namespace esk

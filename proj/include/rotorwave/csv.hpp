#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace rotorwave {

// RFC-4180 quoting: wraps the cell in quotes when it contains a comma,
// quote, or line break, doubling embedded quotes.
std::string csv_quote(const std::string& cell);

// 17 significant digits, round-trip safe.
std::string fmt_g17(double v);

// CSV file whose first line ties it to the manifest that produced it.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& manifest_hash);
  void comment(const std::string& text);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

}  // namespace rotorwave

#include "rotorwave/csv.hpp"

#include <cstdio>

#include "rotorwave/errors.hpp"

namespace rotorwave {

std::string csv_quote(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& manifest_hash)
    : out_(path, std::ios::binary) {
  if (!out_) throw ConfigError("cannot write output file '" + path + "'");
  out_ << "# manifest=" << manifest_hash << "\n";
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ",";
    out_ << csv_quote(cells[i]);
  }
  out_ << "\n";
}

}  // namespace rotorwave

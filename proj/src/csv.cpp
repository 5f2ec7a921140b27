#include "sqqss/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace sqqss {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void emit_csv(const std::string& path, std::span<const std::string> header,
              std::span<const CsvRow> rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  auto write_line = [&out](std::span<const std::string> cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out << ',';
      out << cells[c];
    }
    out << '\n';
  };
  write_line(header);
  for (const CsvRow& row : rows) write_line(row);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace sqqss

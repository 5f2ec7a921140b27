#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqqss {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fixed %.12g rendering (period decimal separator, "nan" for NaN) so that
/// identical inputs always produce byte-identical files.
std::string format_double(double value);

using CsvRow = std::vector<std::string>;

/// Header row plus newline-terminated records, comma separated. Throws
/// IoError when the path cannot be opened or written.
void emit_csv(const std::string& path, std::span<const std::string> header,
              std::span<const CsvRow> rows);

}  // namespace sqqss

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace ibprf {

/// Shortest text that round-trips `v`, always with a decimal point or exponent.
std::string format_double(double v);

/// A CSV document: `#schema=` comment line, header row, data rows.
struct CsvTable {
  std::string schema;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  void write(std::ostream& out) const;
  std::string str() const;
};

/// Quotes a field if it holds a comma, quote or newline.
std::string csv_escape(const std::string& field);

}  // namespace ibprf

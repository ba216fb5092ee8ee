#pragma once

// Numeric tables and their CSV form: header row, comma separated, doubles
// printed with 17 significant digits, non-finite values as "nan".

#include <string>
#include <vector>

namespace cstirap {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const;  // throws if absent
  std::vector<double> column(const std::string& name) const;
};

std::string format_number(double v);
std::string to_csv(const Table& t);
/// Throws Error(parse) on ragged rows or non-numeric cells.
Table parse_csv(const std::string& text);
Table read_csv(const std::string& path);

}  // namespace cstirap

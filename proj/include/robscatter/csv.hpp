#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "robscatter/core.hpp"

namespace robscatter {

// Comma separated, decimal point, optional header (detected when the first
// row is not entirely numeric), no quoting. Throws DataError naming the row
// and column of an empty, non-numeric or non-finite cell.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

CsvTable parse_csv(std::istream& in, const std::string& source = "<input>");
CsvTable read_csv_file(const std::string& path);

DataMatrix to_data_matrix(CsvTable table);

// Shortest representation that parses back to the same double.
std::string format_number(double v);

void write_csv_header(std::ostream& out, const std::vector<std::string>& names);
void write_csv_row(std::ostream& out, const std::vector<double>& values);

}  // namespace robscatter

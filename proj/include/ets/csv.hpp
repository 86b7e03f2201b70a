#ifndef ETS_CSV_HPP
#define ETS_CSV_HPP

#include <string>
#include <vector>

#include "ets/errors.hpp"

// Minimal CSV support for the dataset and report schemas: comma separated,
// no quoting, one header row naming the columns, optional leading
// "# schema_version=N" comment line.

namespace ets::csv {

struct Table {
  int schema_version = 1;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent

  // Typed access with row/column context on failure.
  const std::string& cell(std::size_t row, int col) const;
  double number(std::size_t row, int col) const;
  int integer(std::size_t row, int col) const;
};

Table read_file(const std::string& path);
Table parse(const std::string& text, const std::string& origin = "<memory>");

// Throws SchemaError naming the first missing column.
void require_columns(const Table& table, const std::vector<std::string>& names,
                     const std::string& origin);

std::string escape_field(const std::string& field);

}  // namespace ets::csv

#endif

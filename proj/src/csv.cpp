#include "ets/csv.hpp"

#include <fstream>
#include <sstream>

namespace ets::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

const std::string& Table::cell(std::size_t row, int col) const {
  if (row >= rows.size() || col < 0 || col >= static_cast<int>(rows[row].size()))
    throw SchemaError("cell out of range at row " + std::to_string(row + 1) + ", column " +
                      std::to_string(col + 1));
  return rows[row][static_cast<std::size_t>(col)];
}

double Table::number(std::size_t row, int col) const {
  const std::string& s = cell(row, col);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("expected a number at row " + std::to_string(row + 1) + ", column " +
                      columns[static_cast<std::size_t>(col)] + ", got '" + s + "'");
  }
}

int Table::integer(std::size_t row, int col) const {
  const double v = number(row, col);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw SchemaError("expected an integer at row " + std::to_string(row + 1) + ", column " +
                      columns[static_cast<std::size_t>(col)]);
  return i;
}

Table parse(const std::string& text, const std::string& origin) {
  Table table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      const auto pos = line.find("schema_version=");
      if (pos != std::string::npos)
        table.schema_version = std::atoi(line.c_str() + pos + 15);
      continue;
    }
    if (!have_header) {
      table.columns = split_line(line);
      have_header = true;
    } else {
      auto fields = split_line(line);
      if (fields.size() != table.columns.size())
        throw SchemaError(origin + ": row " + std::to_string(table.rows.size() + 1) +
                          " has " + std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(table.columns.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw SchemaError(origin + ": missing header row");
  return table;
}

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void require_columns(const Table& table, const std::vector<std::string>& names,
                     const std::string& origin) {
  for (const auto& n : names)
    if (table.column(n) < 0) throw SchemaError(origin + ": missing column '" + n + "'");
}

std::string escape_field(const std::string& field) {
  for (char ch : field)
    if (ch == ',' || ch == '\n') throw SchemaError("field contains a delimiter: " + field);
  return field;
}

}  // namespace ets::csv

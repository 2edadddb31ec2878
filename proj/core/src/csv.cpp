#include "cnstn/csv.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cnstn::csv {

namespace {

constexpr const char* kSchemaPrefix = "# cnstn-csv v1 ";

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

void write_schema_line(std::ostream& os, const std::string& kind) {
  os << kSchemaPrefix << kind << "\n";
}

void write_table(std::ostream& os, const std::string& kind,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  write_schema_line(os, kind);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  os << std::setprecision(17);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

void write_table(const std::string& filename, const std::string& kind,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  std::ofstream os(filename);
  if (!os) throw std::runtime_error("csv: cannot open " + filename + " for writing");
  write_table(os, kind, header, rows);
}

Table read_table(std::istream& is, const std::string& expected_kind) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(kSchemaPrefix, 0) != 0)
    throw std::runtime_error("csv: missing schema line (expected '" +
                             std::string(kSchemaPrefix) + "<kind>')");
  Table t;
  t.kind = line.substr(std::string(kSchemaPrefix).size());
  if (!expected_kind.empty() && t.kind != expected_kind)
    throw std::runtime_error("csv: kind mismatch, file says '" + t.kind + "' but expected '" +
                             expected_kind + "'");

  if (!std::getline(is, line)) throw std::runtime_error("csv: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split_cells(line);

  std::size_t lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_cells(line);
    if (cells.size() != t.header.size())
      throw std::runtime_error("csv: row " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(t.header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        throw std::runtime_error("csv: non-numeric cell '" + c + "' at row " +
                                 std::to_string(lineno));
      }
      if (used != c.size())
        throw std::runtime_error("csv: trailing junk in cell '" + c + "' at row " +
                                 std::to_string(lineno));
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_table(const Table& table, const std::string& filename) {
  write_table(filename, table.kind, table.header, table.rows);
}

Table read_table_file(const std::string& filename, const std::string& expected_kind) {
  std::ifstream is(filename);
  if (!is) throw std::runtime_error("csv: cannot open " + filename);
  return read_table(is, expected_kind);
}

}  // namespace cnstn::csv

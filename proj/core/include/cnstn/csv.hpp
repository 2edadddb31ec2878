#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cnstn::csv {

/// Parsed contents of a versioned CSV file: one header row of column names
/// followed by purely numeric data rows.
struct Table {
  std::string kind;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Emit the schema line that tags every CSV we write, e.g.
/// `# cnstn-csv v1 driver-path`.  Readers refuse files whose tag is missing
/// or names a different kind, so format drift fails loudly instead of
/// producing silently misread columns.
void write_schema_line(std::ostream& os, const std::string& kind);

/// Write a complete table: schema line, header row, then data rows at full
/// double precision.
void write_table(std::ostream& os, const std::string& kind,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);
void write_table(const std::string& filename, const std::string& kind,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);
void write_table(const Table& table, const std::string& filename);

/// Parse a versioned CSV stream.  When `expected_kind` is non-empty the
/// schema tag must match it exactly.  Throws std::runtime_error on a missing
/// or mismatched schema line, ragged rows, or non-numeric cells.
Table read_table(std::istream& is, const std::string& expected_kind = "");
Table read_table_file(const std::string& filename, const std::string& expected_kind = "");

}  // namespace cnstn::csv

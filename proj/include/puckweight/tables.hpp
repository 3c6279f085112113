#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace puckweight {

using TableValue = std::variant<std::string, double, std::int64_t>;

// Display formatting for delimited output. JSON output always carries full
// precision; rounding is display-only.
enum class ColumnFormat {
  Text,
  Integer,
  Fixed2,   // odds-style
  Fixed3,   // percentage-style
  General,  // %.6g
  Full,     // %.17g, round-trips doubles exactly
};

struct Table {
  std::vector<std::string> columns;
  std::vector<ColumnFormat> formats;  // one per column
  std::vector<std::vector<TableValue>> rows;

  void add_row(std::vector<TableValue> row) { rows.push_back(std::move(row)); }
};

std::string format_value(const TableValue& v, ColumnFormat fmt);
std::string format_double(double v, ColumnFormat fmt);

void write_delimited(std::ostream& out, const Table& table);
nlohmann::json table_to_json(const Table& table);
void write_json(std::ostream& out, const Table& table);

// Writes in the format selected by `format` ("table" or "json").
void write_table(std::ostream& out, const Table& table,
                 const std::string& format);

}  // namespace puckweight

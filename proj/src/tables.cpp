#include "puckweight/tables.hpp"

#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "puckweight/errors.hpp"

namespace puckweight {

std::string format_double(double v, ColumnFormat fmt) {
  char buf[64];
  switch (fmt) {
    case ColumnFormat::Fixed2:
      std::snprintf(buf, sizeof(buf), "%.2f", v);
      break;
    case ColumnFormat::Fixed3:
      std::snprintf(buf, sizeof(buf), "%.3f", v);
      break;
    case ColumnFormat::Full:
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      break;
    default:
      std::snprintf(buf, sizeof(buf), "%.6g", v);
      break;
  }
  return buf;
}

std::string format_value(const TableValue& v, ColumnFormat fmt) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return format_double(std::get<double>(v), fmt);
}

void write_delimited(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      ColumnFormat fmt =
          c < table.formats.size() ? table.formats[c] : ColumnFormat::General;
      out << format_value(row[c], fmt);
    }
    out << '\n';
  }
}

nlohmann::json table_to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size() && c < table.columns.size(); ++c) {
      const TableValue& v = row[c];
      if (const auto* s = std::get_if<std::string>(&v)) {
        obj[table.columns[c]] = *s;
      } else if (const auto* i = std::get_if<std::int64_t>(&v)) {
        obj[table.columns[c]] = *i;
      } else {
        obj[table.columns[c]] = std::get<double>(v);
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

void write_json(std::ostream& out, const Table& table) {
  out << table_to_json(table).dump(2) << '\n';
}

void write_table(std::ostream& out, const Table& table,
                 const std::string& format) {
  if (format == "json") {
    write_json(out, table);
  } else if (format == "table") {
    write_delimited(out, table);
  } else {
    throw Error(ErrorCategory::Usage, "unknown output format: " + format);
  }
}

}  // namespace puckweight

#pragma once

// Column-oriented result tables and their CSV / JSON renderings. Numbers are
// always written as "%.16e" so that output files are byte-stable.

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "polysl2/error.hpp"

namespace polysl2 {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error(ErrorCode::invalid_argument, "table has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw Error(ErrorCode::invalid_argument, "table row has " + std::to_string(row.size()) + " cells, expected " +
                                                   std::to_string(columns.size()));
    rows.push_back(std::move(row));
  }
};

enum class Format { Csv, Json };

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.16e}", x);
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string cell_text(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

inline std::string json_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(double x) const { return std::isfinite(x) ? format_number(x) : "null"; }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return nlohmann::json(s).dump(); }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace detail

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << detail::csv_field(t.columns[i]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_field(detail::cell_text(row[i]));
    out << '\n';
  }
}

/// {"columns": [...], "rows": [{...}, ...]} with object keys sorted.
inline void write_json(std::ostream& out, const Table& t) {
  std::vector<std::size_t> order(t.columns.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t.columns[a] < t.columns[b]; });
  out << "{\n  \"columns\": [";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? ", " : "") << nlohmann::json(t.columns[i]).dump();
  out << "],\n  \"rows\": [";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out << (r ? ",\n    {" : "\n    {");
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto c = order[k];
      out << (k ? ", " : "") << nlohmann::json(t.columns[c]).dump() << ": " << detail::json_cell(t.rows[r][c]);
    }
    out << "}";
  }
  out << (t.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

inline void write_table(std::ostream& out, const Table& t, Format f) {
  if (f == Format::Csv) write_csv(out, t);
  else write_json(out, t);
}

inline void write_table_file(const std::string& path, const Table& t, Format f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  write_table(out, t, f);
  out.flush();
  if (!out) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

}  // namespace polysl2

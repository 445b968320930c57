#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nessent/errors.hpp"

namespace nessent {

/// An empty cell, a number, or text.
using CsvCell = std::variant<std::monostate, double, long, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;

  void add(std::vector<CsvCell> row) {
    if (row.size() != header.size())
      throw LengthMismatch("CsvTable: row has " + std::to_string(row.size()) + " cells, header " +
                           std::to_string(header.size()));
    rows.push_back(std::move(row));
  }
  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw DomainError("CsvTable: no column '" + name + "'");
  }
};

/// 12 significant digits; `nan` and `inf` spelled out.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_cell(const CsvCell& c) {
  struct {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(long v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + '"';
    }
  } visit;
  return std::visit(visit, c);
}

inline void write_csv(const CsvTable& t, std::ostream& out) {
  auto line = [&](const auto& cells, auto&& fmt) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << fmt(cells[i]);
    }
    out << '\n';
  };
  line(t.header, [](const std::string& s) { return format_cell(s); });
  for (const auto& r : t.rows) line(r, [](const CsvCell& c) { return format_cell(c); });
}

/// Writes with LF line endings regardless of platform.
inline void emit_csv(const CsvTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_csv(t, out);
  if (!out) throw IoError("failed writing " + path);
}

/// Reads back a table written by write_csv. Cells that parse fully as
/// numbers become doubles; empty cells become monostate.
inline CsvTable read_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cur += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    cells.push_back(cur);
    return cells;
  };
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("read_csv: missing header");
  t.header = split(line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw ParseError("read_csv: line " + std::to_string(lineno) + " has wrong cell count");
    std::vector<CsvCell> row;
    for (const auto& s : cells) {
      if (s.empty()) {
        row.emplace_back(std::monostate{});
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end && *end == '\0') row.emplace_back(v);
      else row.emplace_back(s);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_csv(in);
}

}  // namespace nessent

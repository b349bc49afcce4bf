// Bit-stable text serialization of numbers and tables.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace amc::io {

/// Shortest representation that parses back to the same double; "nan",
/// "inf" and "-inf" for non-finite values.
std::string format_double(double x);

/// Strict parse of a whole string; throws ConfigError naming `what`.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

enum class Format { csv, json };

std::string_view to_string(Format format);
Format parse_format(std::string_view text);

/// CSV: header line plus one line per row. Booleans print as 0/1.
std::string to_csv(const Table& table);

/// JSON: {"columns": [...], "rows": [[...], ...]}; non-finite numbers are null.
std::string to_json(const Table& table);

std::string render(const Table& table, Format format);

/// 64-bit FNV-1a digest as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace amc::io

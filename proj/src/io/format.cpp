#include "amc/io/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "amc/errors.hpp"

namespace amc::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double x = 0.0;
  const char* end = text.data() + text.size();
  const char* begin = text.data();
  if (begin != end && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, x);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(std::string(what) + ": expected a number, got '" + std::string(text) + "'");
  }
  return x;
}

long long parse_int(std::string_view text, std::string_view what) {
  long long x = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(std::string(what) + ": expected an integer, got '" + std::string(text) + "'");
  }
  return x;
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width does not match its header");
  rows.push_back(std::move(row));
}

std::string_view to_string(Format format) { return format == Format::json ? "json" : "csv"; }

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  throw ConfigError("format: expected csv or json, got '" + std::string(text) + "'");
}

namespace {

struct CsvCell {
  std::string operator()(double x) const { return format_double(x); }
  std::string operator()(long long x) const { return std::to_string(x); }
  std::string operator()(bool x) const { return x ? "1" : "0"; }
  std::string operator()(const std::string& x) const { return x; }
};

struct JsonCell {
  nlohmann::json operator()(double x) const { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }
  nlohmann::json operator()(long long x) const { return x; }
  nlohmann::json operator()(bool x) const { return x; }
  nlohmann::json operator()(const std::string& x) const { return x; }
};

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  auto line = [&out](const auto& cells, auto&& str) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += str(cells[i]);
    }
    out += '\n';
  };
  line(table.columns, [](const std::string& s) { return s; });
  for (const auto& row : table.rows) line(row, [](const Cell& c) { return std::visit(CsvCell{}, c); });
  return out;
}

std::string to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const Cell& c : row) r.push_back(std::visit(JsonCell{}, c));
    rows.push_back(std::move(r));
  }
  nlohmann::json doc = {{"columns", table.columns}, {"rows", std::move(rows)}};
  return doc.dump(1) + "\n";
}

std::string render(const Table& table, Format format) {
  return format == Format::json ? to_json(table) : to_csv(table);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace amc::io

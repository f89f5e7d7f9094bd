#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace vgp {

enum class OutputFormat { json, csv };
OutputFormat parse_format(const std::string& s);

/// Decimal text with 17 significant digits, enough to round-trip any double.
std::string format_number(double x);

/// Flat table with a fixed header. Cells hold preformatted text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  /// Array of objects keyed by the header; cells that parse as numbers become numbers.
  nlohmann::json to_json() const;
};

/// Parses a CSV produced by Table::to_csv (no quoting).
Table parse_csv(const std::string& text);

/// Writes `text` to `path`, or to standard output when `path` is empty or "-".
void emit_text(const std::string& text, const std::string& path);
/// JSON documents are printed with two-space indentation and a trailing newline.
void emit_report(const nlohmann::json& report, const std::string& path);
void emit_report(const Table& table, OutputFormat format, const std::string& path);

}  // namespace vgp

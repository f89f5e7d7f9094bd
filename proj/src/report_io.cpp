#include "vgp/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "vgp/errors.hpp"

namespace vgp {

OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  throw ValidationError(fmt::format("unknown output format '{}' (expected json or csv)", s));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::string Table::to_csv() const {
  std::string out = fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& r : rows) out += fmt::format("{}\n", fmt::join(r, ","));
  return out;
}

nlohmann::json Table::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < header.size() && c < r.size(); ++c) {
      const std::string& cell = r[c];
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      const bool numeric = !cell.empty() && res.ec == std::errc() &&
                           res.ptr == cell.data() + cell.size() && std::isfinite(v);
      if (!numeric) {
        obj[header[c]] = cell;
      } else if (cell.find_first_of(".eE") == std::string::npos) {
        obj[header[c]] = static_cast<std::int64_t>(v);
      } else {
        obj[header[c]] = v;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

Table parse_csv(const std::string& text) {
  Table t;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t a = 0;
    while (true) {
      const auto comma = line.find(',', a);
      cells.push_back(line.substr(a, comma == std::string::npos ? std::string::npos : comma - a));
      if (comma == std::string::npos) break;
      a = comma + 1;
    }
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

void emit_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError(fmt::format("cannot open '{}' for writing", path));
  f << text;
  if (!f) throw ValidationError(fmt::format("failed writing '{}'", path));
}

void emit_report(const nlohmann::json& report, const std::string& path) {
  emit_text(report.dump(2) + "\n", path);
}

void emit_report(const Table& table, OutputFormat format, const std::string& path) {
  if (format == OutputFormat::csv)
    emit_text(table.to_csv(), path);
  else
    emit_report(table.to_json(), path);
}

}  // namespace vgp

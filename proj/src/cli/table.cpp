#include "trion/cli/table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "trion/error.hpp"

namespace trion::cli {

namespace {

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void require_finite(const Cell& cell, const std::string& column) {
  if (const double* x = std::get_if<double>(&cell); x && !std::isfinite(*x)) {
    throw NumericalFailure("non-finite value in column " + column);
  }
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_real(double x) {
  if (!std::isfinite(x)) throw NumericalFailure("refusing to emit a non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << quote_field(table.columns[c]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      require_finite(row[c], table.columns[c]);
      if (c) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out << format_real(v);
            else if constexpr (std::is_same_v<T, long long>) out << v;
            else out << quote_field(v);
          },
          row[c]);
    }
    out << '\n';
  }
}

void write_json(const Table& table, std::ostream& out) {
  nlohmann::json doc;
  doc["command"] = table.command;
  doc["columns"] = table.columns;
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (std::size_t c = 0; c < row.size(); ++c) {
      require_finite(row[c], table.columns[c]);
      std::visit([&](const auto& v) { r.push_back(v); }, row[c]);
    }
    doc["rows"].push_back(std::move(r));
  }
  out << doc.dump() << '\n';
}

void write_table(const Table& table, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::csv) write_csv(table, out);
  else write_json(table, out);
}

}  // namespace trion::cli

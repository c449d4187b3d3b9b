#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "trion/cli/config.hpp"

namespace trion::cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Throws std::logic_error when the row width differs from the header.
  void add_row(std::vector<Cell> row);
};

// Reals use 17 significant digits. Throws NumericalFailure on NaN/Inf.
std::string format_real(double x);

// Header row then one line per row, "\n" terminated, RFC 4180 quoting.
void write_csv(const Table& table, std::ostream& out);
// {"command": ..., "columns": [...], "rows": [[...], ...]}
void write_json(const Table& table, std::ostream& out);
void write_table(const Table& table, OutputFormat format, std::ostream& out);

}  // namespace trion::cli

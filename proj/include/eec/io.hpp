#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "eec/linalg.hpp"
#include "eec/matrix.hpp"

namespace eec {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

/// Table cell; BigFloat values are carried as preformatted text.
using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class OutputFormat { Csv, Json };

void write_table(std::ostream& os, const Table& t, OutputFormat format);

/// Splits a CSV text with a header line into column names and raw fields.
Table read_csv(const std::string& text);

/// "a,b,c" or "start:stop:step" (inclusive of stop up to rounding).
std::vector<double> parse_grid(const std::string& text);
std::vector<double> parse_list(const std::string& text);

/// {"m": .., "n": .., "scales": [..], "mean": [[..], ..]}
WishartParams parse_params(const std::string& text);
std::string params_to_json(const WishartParams& p);

/// Nested list [[..], ..] or {"rows": r, "cols": c, "data": [row-major]}.
Matrix parse_matrix(const std::string& text);

/// Reads a whole file; throws IoError when it cannot be opened.
std::string read_file(const std::string& path);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eec

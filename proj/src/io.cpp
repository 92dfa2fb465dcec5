#include "eec/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eec/errors.hpp"
#include "json.hpp"

namespace eec {
namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

double to_number(const json& v, const char* what) {
  if (!v.is_number()) throw ParseError(std::string(what) + ": expected a number");
  return v.get<double>();
}

Matrix matrix_from_rows(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty())
    throw ParseError(std::string(what) + ": expected a nonempty list of rows");
  const std::size_t r = rows.size(), c = rows[0].size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != c) throw ParseError(std::string(what) + ": ragged rows");
    for (const auto& v : row) data.push_back(to_number(v, what));
  }
  return Matrix(r, c, std::move(data));
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>)
          return format_double(v);
        else if constexpr (std::is_same_v<T, std::int64_t>)
          return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>)
          return v ? "1" : "0";
        else
          return v;
      },
      c);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table(std::ostream& os, const Table& t, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
      os << '\n';
    }
    return;
  }
  // JSON numbers keep the same 17-digit text as the CSV path; non-finite values become null.
  os << "[\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << "  {";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      os << (i ? ", " : "") << json(t.columns[i]).dump() << ": ";
      const Cell& c = t.rows[r][i];
      if (const double* d = std::get_if<double>(&c))
        os << (std::isfinite(*d) ? format_double(*d) : "null");
      else if (const bool* b = std::get_if<bool>(&c))
        os << (*b ? "true" : "false");
      else if (const std::string* s = std::get_if<std::string>(&c))
        os << json(*s).dump();
      else
        os << csv_cell(c);
    }
    os << (r + 1 < t.rows.size() ? "},\n" : "}\n");
  }
  os << "]\n";
}

Table read_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ls(s);
    while (std::getline(ls, field, ',')) out.push_back(field);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(in, line)) throw ParseError("CSV: missing header");
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Cell> row;
    for (auto& f : split(line)) row.emplace_back(f);
    if (row.size() != t.columns.size()) throw ParseError("CSV: row width differs from header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      throw DomainError("invalid number '" + field + "'");
    }
    while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
    if (used != field.size()) throw DomainError("invalid number '" + field + "'");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text);
  std::string spec = text;
  for (char& c : spec)
    if (c == ':') c = ',';
  const std::vector<double> v = parse_list(spec);
  if (v.size() != 3) throw DomainError("range must be start:stop:step");
  const double start = v[0], stop = v[1], step = v[2];
  if (!(step > 0.0) || !(stop >= start)) throw DomainError("range needs step > 0 and stop >= start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step * (1.0 + 1e-12) + 1e-9)) + 1;
  if (count > 10'000'000) throw DomainError("range has too many points");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

WishartParams parse_params(const std::string& text) {
  const json j = parse_json(text, "parameter file");
  for (const char* key : {"m", "n", "scales", "mean"})
    if (!j.contains(key)) throw ParseError(std::string("parameter file: missing field '") + key + "'");
  if (!j["m"].is_number_integer() || !j["n"].is_number_integer())
    throw ParseError("parameter file: m and n must be integers");
  WishartParams p;
  const auto m = j["m"].get<long long>(), n = j["n"].get<long long>();
  if (m < 1 || n < 1) throw DomainError("parameter file: m and n must be positive");
  p.m = static_cast<std::size_t>(m);
  p.n = static_cast<std::size_t>(n);
  if (!j["scales"].is_array()) throw ParseError("parameter file: scales must be a list");
  for (const auto& v : j["scales"]) p.scales.push_back(to_number(v, "parameter file"));
  p.mean = matrix_from_rows(j["mean"], "parameter file mean");
  p.validate();
  return p;
}

std::string params_to_json(const WishartParams& p) {
  std::ostringstream os;
  os << "{\n  \"m\": " << p.m << ",\n  \"n\": " << p.n << ",\n  \"scales\": [";
  for (std::size_t i = 0; i < p.scales.size(); ++i) os << (i ? ", " : "") << format_double(p.scales[i]);
  os << "],\n  \"mean\": [\n";
  for (std::size_t i = 0; i < p.mean.rows(); ++i) {
    os << "    [";
    for (std::size_t j = 0; j < p.mean.cols(); ++j) os << (j ? ", " : "") << format_double(p.mean(i, j));
    os << (i + 1 < p.mean.rows() ? "],\n" : "]\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

Matrix parse_matrix(const std::string& text) {
  const json j = parse_json(text, "matrix file");
  if (j.is_array()) return matrix_from_rows(j, "matrix file");
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw ParseError("matrix file: expected nested lists or {rows, cols, data}");
  const auto r = j["rows"].get<long long>(), c = j["cols"].get<long long>();
  if (r < 1 || c < 1 || !j["data"].is_array() || j["data"].size() != static_cast<std::size_t>(r * c))
    throw ParseError("matrix file: data length must equal rows * cols");
  std::vector<double> data;
  for (const auto& v : j["data"]) data.push_back(to_number(v, "matrix file"));
  return Matrix(static_cast<std::size_t>(r), static_cast<std::size_t>(c), std::move(data));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return ss.str();
}

}  // namespace eec

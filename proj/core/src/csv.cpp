#include "jointsel/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "jointsel/errors.hpp"

namespace jointsel {

std::string format_double(double x) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double back = std::strtod(buf, nullptr);
    if (back == x || (std::isnan(back) && std::isnan(x))) return buf;
  }
  return buf;  // %.17g always round-trips
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_number(const std::string& cell, double* out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) return false;
  *out = v;
  return true;
}

bool parse_integer(const std::string& cell, long* out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  long v = std::strtol(cell.c_str(), &end, 10);
  if (end != cell.c_str() + cell.size()) return false;
  *out = v;
  return true;
}

}  // namespace

PooledDataset ingest_csv(const std::string& path,
                         const std::string& treatment_column,
                         const std::string& outcome_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_fields(line);

  for (std::size_t a = 0; a < header.size(); ++a) {
    if (header[a].empty())
      throw DataError("header column " + std::to_string(a + 1) + " is empty");
    for (std::size_t b = a + 1; b < header.size(); ++b)
      if (header[a] == header[b])
        throw DataError("duplicate header column '" + header[a] + "'");
  }

  int t_col = -1, y_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == treatment_column) t_col = static_cast<int>(c);
    if (header[c] == outcome_column) y_col = static_cast<int>(c);
  }
  if (t_col < 0)
    throw DataError("treatment column '" + treatment_column + "' not found");
  if (y_col < 0)
    throw DataError("outcome column '" + outcome_column + "' not found");
  if (t_col == y_col)
    throw DataError("treatment and outcome must be different columns");

  PooledDataset data;
  data.treatment_name = treatment_column;
  data.outcome_name = outcome_column;
  std::vector<int> x_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) == t_col || static_cast<int>(c) == y_col) continue;
    x_cols.push_back(static_cast<int>(c));
    data.covariate_names.push_back(header[c]);
  }
  if (x_cols.empty()) throw DataError("'" + path + "' has no covariate columns");

  std::vector<std::string> t_raw;
  std::vector<double> y_vals;
  std::vector<double> x_vals;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size())
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));

    const std::string& t_cell = fields[t_col];
    if (t_cell.empty())
      throw DataError("line " + std::to_string(line_no) + ", column '" +
                      treatment_column + "': empty cell");
    t_raw.push_back(t_cell);

    double v;
    if (!parse_number(fields[y_col], &v))
      throw DataError("line " + std::to_string(line_no) + ", column '" +
                      header[y_col] + "': cannot parse '" + fields[y_col] + "'");
    if (!std::isfinite(v))
      throw DataError("line " + std::to_string(line_no) + ", column '" +
                      header[y_col] + "': non-finite value");
    y_vals.push_back(v);

    for (int c : x_cols) {
      if (!parse_number(fields[c], &v))
        throw DataError("line " + std::to_string(line_no) + ", column '" +
                        header[c] + "': cannot parse '" + fields[c] + "'");
      if (!std::isfinite(v))
        throw DataError("line " + std::to_string(line_no) + ", column '" +
                        header[c] + "': non-finite value");
      x_vals.push_back(v);
    }
  }

  const Eigen::Index n = static_cast<Eigen::Index>(t_raw.size());
  if (n == 0) throw DataError("'" + path + "' has no data rows");
  const Eigen::Index p = static_cast<Eigen::Index>(x_cols.size());

  // Map treatment levels to 0..q-1: numeric order when every level is an
  // integer, lexicographic otherwise.
  std::vector<std::string> levels = t_raw;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  bool all_int = true;
  std::vector<std::pair<long, std::string>> numeric;
  for (const std::string& l : levels) {
    long v;
    if (!parse_integer(l, &v)) {
      all_int = false;
      break;
    }
    numeric.emplace_back(v, l);
  }
  if (all_int) {
    std::sort(numeric.begin(), numeric.end());
    levels.clear();
    for (auto& [v, l] : numeric) levels.push_back(l);
  }
  std::map<std::string, int> level_index;
  for (std::size_t c = 0; c < levels.size(); ++c)
    level_index[levels[c]] = static_cast<int>(c);

  data.q = static_cast<int>(levels.size());
  data.treatment_levels = levels;
  data.X.resize(n, p);
  data.t.resize(n);
  data.y.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    data.t(r) = level_index[t_raw[r]];
    data.y(r) = y_vals[r];
    for (Eigen::Index c = 0; c < p; ++c) data.X(r, c) = x_vals[r * p + c];
  }
  data.validate();
  return data;
}

void export_csv(const PooledDataset& data, const std::string& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");

  std::string t_name = data.treatment_name.empty() ? "t" : data.treatment_name;
  std::string y_name = data.outcome_name.empty() ? "y" : data.outcome_name;
  out << t_name << ',' << y_name;
  for (Eigen::Index c = 0; c < data.p(); ++c) {
    if (c < static_cast<Eigen::Index>(data.covariate_names.size()))
      out << ',' << data.covariate_names[c];
    else
      out << ",x" << c;
  }
  out << '\n';

  bool named_levels =
      static_cast<int>(data.treatment_levels.size()) == data.q;
  for (Eigen::Index r = 0; r < data.n(); ++r) {
    if (named_levels)
      out << data.treatment_levels[data.t(r)];
    else
      out << data.t(r);
    out << ',' << format_double(data.y(r));
    for (Eigen::Index c = 0; c < data.p(); ++c)
      out << ',' << format_double(data.X(r, c));
    out << '\n';
  }
  if (!out) throw DataError("write to '" + path + "' failed");
}

void write_metadata(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
  if (!out) throw DataError("write to '" + path + "' failed");
}

std::vector<std::pair<std::string, std::string>> read_metadata(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == '[') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError(path + " line " + std::to_string(line_no) +
                      ": expected key = value");
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

void write_truth_sidecar(const SynthDraw& draw, const std::string& path) {
  std::vector<std::pair<std::string, std::string>> entries;
  entries.emplace_back("p", std::to_string(draw.true_theta.rows()));
  entries.emplace_back("q", std::to_string(draw.true_theta.cols()));
  entries.emplace_back("support_size",
                       std::to_string(draw.true_support.size()));
  std::string idx;
  for (int i : draw.true_support.indices) {
    if (!idx.empty()) idx += ',';
    idx += std::to_string(i);
  }
  entries.emplace_back("support", idx);
  for (int i : draw.true_support.indices) {
    std::string row;
    for (Eigen::Index c = 0; c < draw.true_theta.cols(); ++c) {
      if (!row.empty()) row += ',';
      row += format_double(draw.true_theta(i, c));
    }
    entries.emplace_back("theta_" + std::to_string(i), row);
  }
  for (const auto& [key, value] : draw.true_ate_empirical)
    entries.emplace_back("ate_empirical_" + std::to_string(key.first) + "_" +
                             std::to_string(key.second),
                         format_double(value));
  for (const auto& [key, value] : draw.true_ate_population)
    entries.emplace_back("ate_population_" + std::to_string(key.first) + "_" +
                             std::to_string(key.second),
                         format_double(value));
  write_metadata(path, entries);
}

}  // namespace jointsel

#include "evint/dataset.hpp"

#include "evint/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace evint {

Dataset::Dataset(Eigen::VectorXd y,
                 RowMatrix x,
                 std::vector<std::string> covariate_names,
                 std::string response_name)
  : y_(std::move(y))
  , x_(std::move(x))
  , names_(std::move(covariate_names))
  , response_name_(std::move(response_name))
{
  if (y_.size() == 0) {
    throw TooFewObservations("dataset must contain at least one row");
  }
  if (x_.rows() != y_.size()) {
    // An empty covariate block is allowed for response-only data.
    if (x_.size() == 0) {
      x_.resize(y_.size(), 0);
    } else {
      throw DimensionMismatch("covariate rows (" + std::to_string(x_.rows()) +
                              ") do not match response length (" +
                              std::to_string(y_.size()) + ")");
    }
  }
  if (names_.empty()) {
    for (Eigen::Index j = 0; j < x_.cols(); ++j) {
      names_.push_back("x" + std::to_string(j + 1));
    }
  } else if (names_.size() != static_cast<std::size_t>(x_.cols())) {
    throw DimensionMismatch("covariate name count does not match column count");
  }
}

std::span<const double>
Dataset::covariates(std::size_t row) const
{
  const auto d = static_cast<std::size_t>(x_.cols());
  return {x_.data() + row * d, d};
}

std::size_t
Dataset::covariate_index(const std::string& name) const
{
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    throw ConfigError("unknown covariate column '" + name + "'");
  }
  return static_cast<std::size_t>(it - names_.begin());
}

Dataset
Dataset::select_rows(std::span<const std::size_t> rows) const
{
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  RowMatrix x(static_cast<Eigen::Index>(rows.size()), x_.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    y(static_cast<Eigen::Index>(i)) = y_(r);
    x.row(static_cast<Eigen::Index>(i)) = x_.row(r);
  }
  return Dataset(std::move(y), std::move(x), names_, response_name_);
}

Dataset
Dataset::with_response(Eigen::VectorXd y) const
{
  return Dataset(std::move(y), x_, names_, response_name_);
}

namespace {

// RFC 4180 record splitting: quoted fields, doubled quotes, CRLF endings.
bool
read_record(std::istream& in, std::vector<std::string>& fields)
{
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) {
    return false;
  }
  if (in_quotes) {
    throw CsvError("unterminated quoted field");
  }
  fields.push_back(std::move(field));
  return true;
}

std::string
trim(const std::string& s)
{
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) {
    return {};
  }
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double
parse_cell(const std::string& raw, std::size_t line, const std::string& column)
{
  const std::string cell = trim(raw);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() ||
      !std::isfinite(value)) {
    throw CsvError("line " + std::to_string(line) + ", column '" + column +
                   "': missing or non-numeric value '" + cell + "'");
  }
  return value;
}

} // namespace

Dataset
read_csv(std::istream& in, const std::string& response)
{
  std::vector<std::string> header;
  if (!read_record(in, header)) {
    throw CsvError("empty input: a header row is required");
  }
  for (auto& h : header) {
    h = trim(h);
  }
  auto resp_it = std::find(header.begin(), header.end(), response);
  if (resp_it == header.end()) {
    throw ConfigError("response column '" + response + "' not found in header");
  }
  const auto resp_col = static_cast<std::size_t>(resp_it - header.begin());

  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != resp_col) {
      names.push_back(header[j]);
    }
  }

  std::vector<double> ys;
  std::vector<double> xs;
  std::vector<std::string> fields;
  std::size_t line = 1;
  while (read_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && trim(fields[0]).empty()) {
      continue; // blank line
    }
    if (fields.size() != header.size()) {
      throw CsvError("line " + std::to_string(line) + ": expected " +
                     std::to_string(header.size()) + " fields, found " +
                     std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const double v = parse_cell(fields[j], line, header[j]);
      if (j == resp_col) {
        ys.push_back(v);
      } else {
        xs.push_back(v);
      }
    }
  }
  if (ys.empty()) {
    throw CsvError("no data rows");
  }
  const auto n = static_cast<Eigen::Index>(ys.size());
  const auto d = static_cast<Eigen::Index>(names.size());
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  RowMatrix x(n, d);
  if (d > 0) {
    x = Eigen::Map<RowMatrix>(xs.data(), n, d);
  }
  return Dataset(std::move(y), std::move(x), std::move(names), response);
}

Dataset
read_csv(const std::filesystem::path& path, const std::string& response)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CsvError("cannot open '" + path.string() + "'");
  }
  return read_csv(in, response);
}

void
write_csv(std::ostream& out, const Dataset& data)
{
  std::ostringstream os;
  os << std::setprecision(17);
  os << data.response_name();
  for (const auto& name : data.covariate_names()) {
    os << ',' << name;
  }
  os << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    os << data.response(i);
    for (double v : data.covariates(i)) {
      os << ',' << v;
    }
    os << '\n';
  }
  out << os.str();
}

} // namespace evint

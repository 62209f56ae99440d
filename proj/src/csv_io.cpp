#include "censadd/csv_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace censadd {

namespace {

[[noreturn]] void
fail(const std::string& source, std::size_t line, const std::string& what)
{
  throw std::invalid_argument(source + ":" + std::to_string(line) + ": " + what);
}

std::string
trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool
parse_double(const std::string& text, double& value)
{
  const std::string t = trim(text);
  if (t.empty()) {
    return false;
  }
  errno = 0;
  char* end = nullptr;
  value = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && errno != ERANGE;
}

bool
blank(const std::string& line)
{
  return trim(line).empty();
}

} // namespace

std::string
format_double(double value)
{
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::vector<std::string>
split_csv_record(const std::string& line)
{
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

CensoredSample
read_sample_csv(std::istream& in, const std::string& source)
{
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) {
      header = split_csv_record(line);
      break;
    }
  }
  if (header.empty()) {
    fail(source, line_no, "missing header");
  }
  for (auto& h : header) {
    h = trim(h);
  }
  if (header.size() < 3 || header[0] != "z" || header[1] != "delta") {
    fail(source, line_no, "header must be z,delta,x1,...,xd");
  }
  const std::size_t d = header.size() - 2;
  for (std::size_t a = 0; a < d; ++a) {
    if (header[a + 2] != "x" + std::to_string(a + 1)) {
      fail(source, line_no, "expected column x" + std::to_string(a + 1) + ", found '" + header[a + 2] + "'");
    }
  }

  std::vector<double> z;
  std::vector<std::uint8_t> delta;
  std::vector<double> x;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) {
      continue;
    }
    const auto fields = split_csv_record(line);
    if (fields.size() != d + 2) {
      fail(source, line_no, "expected " + std::to_string(d + 2) + " fields, found " +
                              std::to_string(fields.size()));
    }
    double zi = 0.0;
    if (!parse_double(fields[0], zi) || !std::isfinite(zi) || zi < 0.0) {
      fail(source, line_no, "z must be a finite non-negative number, found '" + trim(fields[0]) + "'");
    }
    const std::string flag = trim(fields[1]);
    if (flag != "0" && flag != "1") {
      fail(source, line_no, "delta must be 0 or 1, found '" + flag + "'");
    }
    z.push_back(zi);
    delta.push_back(flag == "1" ? 1 : 0);
    for (std::size_t a = 0; a < d; ++a) {
      double v = 0.0;
      if (!parse_double(fields[a + 2], v) || !std::isfinite(v)) {
        fail(source, line_no, "x" + std::to_string(a + 1) + " is not a finite number");
      }
      x.push_back(v);
    }
  }
  if (z.empty()) {
    fail(source, line_no, "no data rows");
  }
  return CensoredSample(std::move(z), std::move(delta), std::move(x), d);
}

CensoredSample
read_sample_csv_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  return read_sample_csv(in, path);
}

void
write_sample_csv(std::ostream& out, const CensoredSample& sample)
{
  out << "z,delta";
  for (std::size_t a = 0; a < sample.dim(); ++a) {
    out << ",x" << a + 1;
  }
  out << '\n';
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out << format_double(sample.z(i)) << ',' << (sample.delta(i) ? 1 : 0);
    for (std::size_t a = 0; a < sample.dim(); ++a) {
      out << ',' << format_double(sample.x(i, a));
    }
    out << '\n';
  }
}

void
write_bands_csv(std::ostream& out, const AdditiveFit& fit)
{
  auto optional_field = [&](const std::vector<double>& values, std::size_t j) {
    out << ',';
    if (j < values.size()) {
      out << format_double(values[j]);
    }
  };
  out << "axis,x,eta_hat,sigma_hat,ci_lo,ci_hi,eta_true_if_known\n";
  for (const auto& band : fit.components) {
    for (std::size_t j = 0; j < band.grid.size(); ++j) {
      out << band.axis + 1 << ',' << format_double(band.grid[j]) << ',' << format_double(band.eta_hat[j]);
      optional_field(band.sigma_hat, j);
      optional_field(band.ci_lo, j);
      optional_field(band.ci_hi, j);
      optional_field(band.eta_true ? *band.eta_true : std::vector<double>{}, j);
      out << '\n';
    }
  }
}

AdditiveFit
read_bands_csv(std::istream& in, const std::string& source)
{
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    fail(source, 1, "missing header");
  }
  ++line_no;
  if (trim(line) != "axis,x,eta_hat,sigma_hat,ci_lo,ci_hi,eta_true_if_known") {
    fail(source, line_no, "unexpected band header");
  }
  AdditiveFit fit;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) {
      continue;
    }
    const auto fields = split_csv_record(line);
    if (fields.size() != 7) {
      fail(source, line_no, "expected 7 fields");
    }
    double axis_value = 0.0;
    if (!parse_double(fields[0], axis_value) || axis_value < 1.0) {
      fail(source, line_no, "axis must be a positive integer");
    }
    const auto axis = static_cast<std::size_t>(axis_value) - 1;
    if (fit.components.empty() || fit.components.back().axis != axis) {
      ComponentBand band;
      band.axis = axis;
      fit.components.push_back(std::move(band));
    }
    ComponentBand& band = fit.components.back();
    double v = 0.0;
    if (!parse_double(fields[1], v)) {
      fail(source, line_no, "x is not a number");
    }
    band.grid.push_back(v);
    if (!parse_double(fields[2], v)) {
      fail(source, line_no, "eta_hat is not a number");
    }
    band.eta_hat.push_back(v);
    std::vector<double>* optional_columns[] = { &band.sigma_hat, &band.ci_lo, &band.ci_hi };
    for (std::size_t c = 0; c < 3; ++c) {
      if (parse_double(fields[3 + c], v)) {
        optional_columns[c]->push_back(v);
      }
    }
    if (parse_double(fields[6], v)) {
      if (!band.eta_true) {
        band.eta_true.emplace();
      }
      band.eta_true->push_back(v);
    }
  }
  return fit;
}

} // namespace censadd

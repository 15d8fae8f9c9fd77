#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

#include "geoframe/signal.hpp"

namespace geoframe {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

CsvParseError::CsvParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("failed to format double");
  return std::string(buf, end);
}

double parse_double(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  }
  return value;
}

SampleSeries read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvParseError(1, "missing header");
  const auto header = split_commas(trim(line));
  if (header.size() < 2 || trim(header[0]) != "t") {
    throw CsvParseError(1, "header must be t,v1,...,vn");
  }
  for (std::size_t k = 1; k < header.size(); ++k) {
    if (trim(header[k]) != "v" + std::to_string(k)) {
      throw CsvParseError(1, "unexpected header column '" + std::string(header[k]) + "'");
    }
  }
  const std::size_t n = header.size() - 1;
  SampleSeries series(n);
  std::vector<double> row(n);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto fields = split_commas(body);
    if (fields.size() != n + 1) {
      throw CsvParseError(line_no, "expected " + std::to_string(n + 1) + " fields, found " +
                                       std::to_string(fields.size()));
    }
    double t = 0.0;
    try {
      t = parse_double(fields[0]);
      for (std::size_t k = 0; k < n; ++k) row[k] = parse_double(fields[k + 1]);
    } catch (const std::invalid_argument& e) {
      throw CsvParseError(line_no, e.what());
    }
    if (!series.empty() && !(t > series.times().back())) {
      throw CsvParseError(line_no, "timestamps must be strictly increasing");
    }
    series.append(t, row);
  }
  return series;
}

SampleSeries read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvIoError("cannot open " + path.string());
  return read_csv(in);
}

void write_csv(const SampleSeries& series, std::ostream& out) {
  out << 't';
  for (std::size_t k = 1; k <= series.phase_count(); ++k) out << ",v" << k;
  out << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_double(series.time(i));
    for (double v : series.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_csv(const SampleSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvIoError("cannot write " + path.string());
  write_csv(series, out);
  if (!out) throw CsvIoError("write failed for " + path.string());
}

}  // namespace geoframe

#include "topobus/csv.hpp"

#include <array>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace topobus::io {

std::string format_double(double value) {
  std::array<char, 40> buf;
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::scientific, 16);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view token) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  }
  return value;
}

std::string write_csv(const CsvDocument& doc) {
  std::ostringstream out;
  for (const auto& [key, value] : doc.metadata) {
    out << "# " << key << " = " << value << "\n";
  }
  for (std::size_t c = 0; c < doc.header.size(); ++c) {
    out << (c ? "," : "") << doc.header[c];
  }
  out << "\n";
  for (const auto& row : doc.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << format_double(row[c]);
    }
    out << "\n";
  }
  return out.str();
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

CsvDocument read_csv(std::string_view text) {
  CsvDocument doc;
  bool have_header = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? text.size() - start
                                                                             : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (line.empty()) continue;
    if (line.starts_with("#")) {
      line.remove_prefix(1);
      const std::size_t eq = line.find('=');
      if (eq != std::string_view::npos) {
        auto trim = [](std::string_view s) {
          while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
          while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
          return std::string(s);
        };
        doc.metadata.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
      }
      continue;
    }
    if (!have_header) {
      for (auto field : split(line, ',')) doc.header.emplace_back(field);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(doc.header.size());
    for (auto field : split(line, ',')) row.push_back(parse_double(field));
    if (row.size() != doc.header.size()) {
      throw std::invalid_argument("csv row width does not match header");
    }
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

}  // namespace topobus::io

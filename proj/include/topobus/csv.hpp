#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace topobus::io {

/// 17 significant digits, scientific, locale-independent; round-trips exactly.
std::string format_double(double value);

/// Parses what format_double writes (and ordinary decimal literals).
double parse_double(std::string_view token);

struct CsvDocument {
  std::vector<std::pair<std::string, std::string>> metadata;  ///< "# key = value" lines
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string write_csv(const CsvDocument& doc);
CsvDocument read_csv(std::string_view text);

}  // namespace topobus::io

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pcg::csv {

std::string trim(std::string_view s);
std::vector<std::string> split_line(std::string_view line);

/// Header-indexed comma-separated table. Blank lines are skipped.
struct Table {
  std::map<std::string, std::size_t> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  /// Column index; throws DataError "missing column" when absent.
  std::size_t require(const std::string& name) const;
};

Table read(std::istream& in);

long long parse_integer(std::string_view token, std::string_view what);

}  // namespace pcg::csv

#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>

#include "pcg/error.hpp"

namespace pcg::csv {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

std::size_t Table::require(const std::string& name) const {
  auto it = columns.find(name);
  if (it == columns.end()) throw DataError("missing column '" + name + "'");
  return it->second;
}

Table read(std::istream& in) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    for (auto& f : fields) f = trim(f);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        std::string key = fields[i];
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        table.columns.emplace(key, i);
      }
      have_header = true;
      continue;
    }
    if (fields.size() < table.columns.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.columns.size()) + " fields");
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  return table;
}

long long parse_integer(std::string_view token, std::string_view what) {
  long long value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError("invalid integer for " + std::string(what) + ": '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace pcg::csv

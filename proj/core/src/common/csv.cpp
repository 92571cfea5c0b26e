#include "natalia/common/csv.hpp"

#include <fstream>
#include <sstream>

#include "natalia/common/error.hpp"

namespace natalia {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view text,
                              std::string_view header_first_field) {
  std::vector<CsvRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const auto line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    CsvRow row;
    row.line = line_no;
    std::size_t start = 0;
    while (true) {
      const auto comma = trimmed.find(',', start);
      row.fields.push_back(trim(std::string_view(trimmed).substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows.empty() && !header_first_field.empty() &&
        row.fields.front() == header_first_field) {
      header_first_field = {};
      continue;
    }
    header_first_field = {};
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path,
                             std::string_view header_first_field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), header_first_field);
}

}  // namespace natalia

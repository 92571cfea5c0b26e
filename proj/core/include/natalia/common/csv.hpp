#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace natalia {

/// One parsed CSV record with its 1-based source line for diagnostics.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Minimal comma-separated reader: no quoting, fields are trimmed, blank
/// lines and lines starting with '#' are skipped. If the first record's
/// first field equals `header_first_field`, that record is dropped.
std::vector<CsvRow> read_csv(const std::filesystem::path& path,
                             std::string_view header_first_field = {});

std::vector<CsvRow> parse_csv(std::string_view text,
                              std::string_view header_first_field = {});

}  // namespace natalia

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace smienum::csv {

using Row = std::vector<std::string>;

// RFC 4180 style: comma separated, double-quoted fields may contain commas,
// quotes ("") and newlines. CRLF and LF line endings are accepted.
std::vector<Row> parse(std::string_view text);

std::vector<Row> read_file(const std::filesystem::path &path);

// Quotes the field only when it needs it.
std::string escape(std::string_view field);

std::string format_row(const Row &row);

}  // namespace smienum::csv

#pragma once

// Minimal RFC-4180 style reader: comma separated, optional double quotes,
// surrounding whitespace trimmed from unquoted fields.

#include <filesystem>
#include <string>
#include <vector>

namespace fairfront::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_line(const std::string& line);

// First non-blank line is the header. Throws DataError on I/O failure.
Table read_file(const std::filesystem::path& path);

// Quotes fields containing commas, quotes or newlines.
std::string join(const std::vector<std::string>& fields);

}  // namespace fairfront::csv

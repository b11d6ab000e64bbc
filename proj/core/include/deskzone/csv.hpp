#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace deskzone::csv {

struct Row {
  long line = 0;  // 1-based line number in the source file
  std::vector<std::string> fields;
};

/// Comma-separated table with a mandatory header row. Blank lines and lines
/// starting with '#' are skipped. Fields are trimmed of surrounding spaces;
/// quoting is not supported (none of our schemas need it).
struct Table {
  std::string source;
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Column index of `name`, or throws FileError.
  std::size_t column(std::string_view name) const;
};

Table parse(std::istream& in, const std::string& source_name);
Table read_file(const std::string& path);

/// Throws FileError unless the header equals `expected` exactly.
void require_header(const Table& table, const std::vector<std::string>& expected);

double parse_double(const std::string& text, const std::string& source, long line);
long long parse_int(const std::string& text, const std::string& source, long line);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

using Provenance = std::vector<std::pair<std::string, std::string>>;

/// Writes `# key=value` provenance lines; used as the first lines of every
/// file the tool emits.
void write_comment_header(std::ostream& out, const Provenance& entries);

}  // namespace deskzone::csv

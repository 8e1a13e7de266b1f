#ifndef TRICAV_TOOLS_TABLE_HPP
#define TRICAV_TOOLS_TABLE_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace tricav::cli {

enum class Format { Csv, Json };

const char* extension(Format f);

/// A rectangular artifact with text cells, as written by the library's CSV
/// writers.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::set<std::string> text_columns;  // never emitted as JSON numbers
};

Table parse_csv(const std::string& text);

/// {"columns": [...], "rows": [[...], ...]}. Cells that parse as numbers are
/// emitted as numbers, "nan" as null, anything else as a string.
std::string to_json(const Table& t);
Table parse_json(const std::string& text);

std::string render(const Table& t, Format f);
Table parse(const std::string& text, Format f);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a64(const std::string& bytes);

}  // namespace tricav::cli

#endif  // TRICAV_TOOLS_TABLE_HPP

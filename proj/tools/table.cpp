#include "table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tricav/types.hpp"

namespace tricav::cli {

using nlohmann::json;

const char* extension(Format f) { return f == Format::Json ? ".json" : ".csv"; }

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool as_number(const std::string& s, double& v) {
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && end == s.data() + s.size();
}

}  // namespace

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("empty CSV");
  t.columns = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split(line));
  }
  return t;
}

std::string to_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (std::size_t k = 0; k < r.size(); ++k) {
      const auto& cell = r[k];
      double v{};
      if (k < t.columns.size() && t.text_columns.count(t.columns[k]))
        row.push_back(cell);
      else if (cell == "nan")
        row.push_back(nullptr);
      else if (as_number(cell, v) && std::isfinite(v))
        row.push_back(v);
      else
        row.push_back(cell);
    }
    rows.push_back(std::move(row));
  }
  return json{{"columns", t.columns}, {"rows", std::move(rows)}}.dump(1) + "\n";
}

Table parse_json(const std::string& text) {
  Table t;
  json j;
  try {
    j = json::parse(text);
    t.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
      std::vector<std::string> cells;
      for (const auto& c : row) {
        if (c.is_null())
          cells.emplace_back("nan");
        else if (c.is_string())
          cells.push_back(c.get<std::string>());
        else if (c.is_number())
          cells.push_back(c.dump());
        else
          throw ValidationError("unexpected JSON cell " + c.dump());
      }
      t.rows.push_back(std::move(cells));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed JSON table: ") + e.what());
  }
  return t;
}

std::string render(const Table& t, Format f) {
  if (f == Format::Json) return to_json(t);
  std::ostringstream os;
  for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << r[k];
    os << '\n';
  }
  return os.str();
}

Table parse(const std::string& text, Format f) { return f == Format::Json ? parse_json(text) : parse_csv(text); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
  if (!out) throw ValidationError("write failed for " + path);
}

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tricav::cli

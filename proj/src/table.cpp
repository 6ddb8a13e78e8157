#include "rrs/table.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rrs/errors.hpp"

#include "json.hpp"

namespace rrs {

namespace {

bool cell_matches(const Cell& cell, ColumnType type) {
  switch (type) {
    case ColumnType::real:
      return std::holds_alternative<double>(cell) ||
             std::holds_alternative<std::int64_t>(cell);
    case ColumnType::integer:
      return std::holds_alternative<std::int64_t>(cell);
    case ColumnType::text:
      return std::holds_alternative<std::string>(cell);
    case ColumnType::boolean:
      return std::holds_alternative<bool>(cell);
  }
  return false;
}

void validate(const Table& table) {
  for (const auto& row : table.rows) {
    if (row.size() != table.schema.size())
      throw SchemaMismatch("row width does not match schema");
    for (std::size_t j = 0; j < row.size(); ++j)
      if (!cell_matches(row[j], table.schema[j].type))
        throw SchemaMismatch("cell type mismatch in column " +
                             table.schema[j].name);
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void Table::add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }

std::string format_cell(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(cell));
    return buf;
  }
  if (std::holds_alternative<std::int64_t>(cell))
    return std::to_string(std::get<std::int64_t>(cell));
  if (std::holds_alternative<bool>(cell))
    return std::get<bool>(cell) ? "true" : "false";
  return std::get<std::string>(cell);
}

void write_text_atomic(const std::string& path, const std::string& payload) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp);
    out << payload;
    if (!out) throw IoError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit_table(const Table& table, const Meta& meta, const std::string& path,
                const std::string& format) {
  validate(table);
  std::ostringstream out;
  if (format == "csv") {
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    for (std::size_t j = 0; j < table.schema.size(); ++j) {
      if (j) out << ",";
      out << csv_escape(table.schema[j].name);
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) out << ",";
        out << csv_escape(format_cell(row[j]));
      }
      out << "\n";
    }
  } else if (format == "json") {
    nlohmann::ordered_json doc;
    auto& jm = doc["meta"];
    for (const auto& [k, v] : meta) jm[k] = v;
    for (const auto& col : table.schema) doc["schema"].push_back(col.name);
    doc["rows"] = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json jr = nlohmann::json::array();
      for (const auto& cell : row) {
        if (std::holds_alternative<double>(cell))
          jr.push_back(std::get<double>(cell));
        else if (std::holds_alternative<std::int64_t>(cell))
          jr.push_back(std::get<std::int64_t>(cell));
        else if (std::holds_alternative<bool>(cell))
          jr.push_back(std::get<bool>(cell));
        else
          jr.push_back(std::get<std::string>(cell));
      }
      doc["rows"].push_back(std::move(jr));
    }
    out << doc.dump(2) << "\n";
  } else {
    throw Error("unknown output format: " + format);
  }
  write_text_atomic(path, out.str());
}

Table parse_table_csv(const std::string& path, Meta* meta) {
  std::istringstream in(read_text(path));
  Table table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (meta) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) {
          std::string key = line.substr(1, eq - 1);
          while (!key.empty() && key.front() == ' ') key.erase(key.begin());
          meta->emplace_back(key, line.substr(eq + 1));
        }
      }
      continue;
    }
    // Split one CSV record (quotes per RFC 4180).
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    if (!header_seen) {
      for (auto& f : fields) table.schema.push_back({f, ColumnType::text});
      header_seen = true;
    } else {
      std::vector<Cell> row;
      row.reserve(fields.size());
      for (auto& f : fields) row.emplace_back(std::move(f));
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace rrs

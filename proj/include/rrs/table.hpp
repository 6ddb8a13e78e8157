#ifndef RRS_TABLE_HPP
#define RRS_TABLE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace rrs {

inline constexpr const char* kVersion = "0.1.0";

using Cell = std::variant<double, std::int64_t, std::string, bool>;

enum class ColumnType { real, integer, text, boolean };

struct ColumnSpec {
  std::string name;
  ColumnType type;
};

struct Table {
  std::vector<ColumnSpec> schema;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

//! Ordered key/value header embedded in every output file: tool version,
//! resolved config, seed, and per-assertion pass flags.
using Meta = std::vector<std::pair<std::string, std::string>>;

std::string format_cell(const Cell& cell);

//! Write a table atomically (temp file + rename).  CSV: '#'-prefixed meta
//! lines, a header row, then rows with reals at 17 significant digits.
//! JSON: {"meta": {...}, "schema": [...], "rows": [...]}.
void emit_table(const Table& table, const Meta& meta, const std::string& path,
                const std::string& format = "csv");

//! Round-trip reader for the CSV form (meta lines returned separately).
Table parse_table_csv(const std::string& path, Meta* meta = nullptr);

//! Atomic write of an arbitrary text payload (JSON summaries etc.).
void write_text_atomic(const std::string& path, const std::string& payload);

std::string read_text(const std::string& path);

}  // namespace rrs

#endif

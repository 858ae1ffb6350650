#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "examl/errors.hpp"
#include "examl/linalg.hpp"

namespace examl {

// ---------------------------------------------------------------------------
// RFC 4180 reader: comma delimiter, double-quote quoting with "" escapes,
// CRLF or LF line ends, embedded newlines inside quotes, optional UTF-8 BOM.
// ---------------------------------------------------------------------------

using CsvRecord = std::vector<std::string>;

inline std::vector<CsvRecord> parse_csv_text(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<CsvRecord> records;
  CsvRecord record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line yields one empty field; skip it.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw FormatError("CSV line " + std::to_string(line) + ": quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',': end_field(); break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw FormatError("CSV ends inside a quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string csv_escape(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

enum class ColumnKind { numeric, categorical, target, ignore };

inline std::string_view to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::target: return "target";
    case ColumnKind::ignore: return "ignore";
  }
  return "?";
}

inline ColumnKind parse_column_kind(std::string_view s) {
  if (s == "numeric") return ColumnKind::numeric;
  if (s == "categorical") return ColumnKind::categorical;
  if (s == "target") return ColumnKind::target;
  if (s == "ignore") return ColumnKind::ignore;
  throw InvalidArgument("unknown column kind '" + std::string(s) + "'");
}

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::size_t min_frequency = 1;   // categorical only
  std::string separator;           // categorical only; non-empty means multi-valued cells
};

/// Column roles for a CSV file. Columns absent from `columns` take `default_kind`
/// when it is set; otherwise every header name must be listed.
struct TableSchema {
  std::vector<ColumnSpec> columns;
  std::optional<ColumnKind> default_kind;

  void validate() const {
    std::unordered_set<std::string> seen;
    std::size_t targets = 0;
    for (const auto& c : columns) {
      if (!seen.insert(c.name).second) throw InvalidArgument("schema lists column '" + c.name + "' twice");
      if (c.kind == ColumnKind::target) ++targets;
      if (c.min_frequency < 1) throw InvalidArgument("min_frequency must be >= 1 for column '" + c.name + "'");
    }
    if (targets != 1) throw InvalidArgument("schema must name exactly one target column");
    if (default_kind == ColumnKind::target) throw InvalidArgument("default_kind cannot be 'target'");
  }

  const ColumnSpec& target() const {
    for (const auto& c : columns)
      if (c.kind == ColumnKind::target) return c;
    throw InvalidArgument("schema has no target column");
  }

  const ColumnSpec* find(std::string_view name) const {
    for (const auto& c : columns)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline TableSchema schema_from_json(const nlohmann::json& doc) {
  TableSchema schema;
  if (!doc.contains("columns") || !doc["columns"].is_array())
    throw FormatError("schema document needs a 'columns' array");
  for (const auto& col : doc["columns"]) {
    ColumnSpec spec;
    spec.name = col.at("name").get<std::string>();
    spec.kind = parse_column_kind(col.at("kind").get<std::string>());
    spec.min_frequency = col.value("min_frequency", std::size_t{1});
    spec.separator = col.value("separator", std::string{});
    schema.columns.push_back(std::move(spec));
  }
  if (doc.contains("default_kind")) schema.default_kind = parse_column_kind(doc["default_kind"].get<std::string>());
  schema.validate();
  return schema;
}

inline nlohmann::json schema_to_json(const TableSchema& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : schema.columns) {
    nlohmann::json j{{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
    if (c.kind == ColumnKind::categorical) {
      j["min_frequency"] = c.min_frequency;
      if (!c.separator.empty()) j["separator"] = c.separator;
    }
    cols.push_back(std::move(j));
  }
  nlohmann::json doc{{"columns", cols}};
  if (schema.default_kind) doc["default_kind"] = std::string(to_string(*schema.default_kind));
  return doc;
}

inline TableSchema load_schema(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("schema " + path + ": " + e.what());
  }
  return schema_from_json(doc);
}

// ---------------------------------------------------------------------------
// Typed table
// ---------------------------------------------------------------------------

struct CategoricalColumn {
  std::string name;
  std::size_t min_frequency = 1;
  std::string separator;
  std::vector<std::string> values;
};

struct RawTable {
  std::vector<std::string> numeric_names;
  Matrix numeric;  // rows × numeric_names.size()
  std::vector<CategoricalColumn> categorical;
  std::string target_name;
  std::vector<std::string> targets;  // empty when the target column was absent and optional

  std::size_t rows() const { return static_cast<std::size_t>(numeric.rows()); }

  RawTable select_rows(const std::vector<std::size_t>& indices) const {
    RawTable out;
    out.numeric_names = numeric_names;
    out.target_name = target_name;
    out.numeric.resize(static_cast<Eigen::Index>(indices.size()), numeric.cols());
    for (std::size_t r = 0; r < indices.size(); ++r)
      out.numeric.row(static_cast<Eigen::Index>(r)) = numeric.row(static_cast<Eigen::Index>(indices[r]));
    for (const auto& col : categorical) {
      CategoricalColumn c{col.name, col.min_frequency, col.separator, {}};
      c.values.reserve(indices.size());
      for (auto i : indices) c.values.push_back(col.values[i]);
      out.categorical.push_back(std::move(c));
    }
    if (!targets.empty()) {
      out.targets.reserve(indices.size());
      for (auto i : indices) out.targets.push_back(targets[i]);
    }
    return out;
  }
};

struct LoadOptions {
  bool target_required = true;
  bool ignore_unknown_columns = false;
};

/// Parses CSV text against a schema. Missing or unparseable numeric cells and
/// missing single-valued categorical cells are errors naming the row and column.
inline RawTable table_from_csv_text(std::string_view text, const TableSchema& schema, LoadOptions opts = {}) {
  schema.validate();
  auto records = parse_csv_text(text);
  if (records.empty()) throw FormatError("CSV has no header row");
  const CsvRecord& header = records.front();
  if (records.size() == 1) throw InvalidArgument("dataset is empty (header only)");

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (!position.emplace(header[i], i).second) throw FormatError("CSV header repeats column '" + header[i] + "'");

  const ColumnSpec& target_spec = schema.target();
  for (const auto& c : schema.columns) {
    if (position.count(c.name)) continue;
    if (c.kind == ColumnKind::target && !opts.target_required) continue;
    if (c.kind == ColumnKind::ignore) continue;
    throw FormatError("CSV header lacks schema column '" + c.name + "'");
  }

  struct Slot {
    std::size_t csv_index;
    ColumnSpec spec;
  };
  std::vector<Slot> numeric_slots, categorical_slots;
  std::optional<std::size_t> target_index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const ColumnSpec* spec = schema.find(header[i]);
    ColumnSpec resolved;
    if (spec) {
      resolved = *spec;
    } else if (schema.default_kind) {
      resolved = ColumnSpec{header[i], *schema.default_kind, 1, {}};
    } else if (opts.ignore_unknown_columns) {
      continue;
    } else {
      throw FormatError("CSV column '" + header[i] + "' is not in the schema");
    }
    switch (resolved.kind) {
      case ColumnKind::numeric: numeric_slots.push_back({i, resolved}); break;
      case ColumnKind::categorical: categorical_slots.push_back({i, resolved}); break;
      case ColumnKind::target: target_index = i; break;
      case ColumnKind::ignore: break;
    }
  }

  const std::size_t n = records.size() - 1;
  RawTable table;
  table.target_name = target_spec.name;
  table.numeric.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(numeric_slots.size()));
  for (const auto& s : numeric_slots) table.numeric_names.push_back(s.spec.name);
  for (const auto& s : categorical_slots) {
    table.categorical.push_back({s.spec.name, s.spec.min_frequency, s.spec.separator, {}});
    table.categorical.back().values.reserve(n);
  }
  if (target_index) table.targets.reserve(n);

  for (std::size_t r = 0; r < n; ++r) {
    const CsvRecord& rec = records[r + 1];
    if (rec.size() != header.size())
      throw ParseError("row " + std::to_string(r + 1) + ": expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(rec.size()),
                       r + 1, {});
    for (std::size_t k = 0; k < numeric_slots.size(); ++k) {
      const auto& slot = numeric_slots[k];
      const std::string& cell = rec[slot.csv_index];
      auto v = parse_number(cell);
      if (!v) {
        const std::string problem = cell.empty() ? "missing value" : "cannot parse '" + cell + "' as a number";
        throw ParseError("row " + std::to_string(r + 1) + ", column '" + slot.spec.name + "': " + problem, r + 1,
                         slot.spec.name);
      }
      table.numeric(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = *v;
    }
    for (std::size_t k = 0; k < categorical_slots.size(); ++k) {
      const auto& slot = categorical_slots[k];
      const std::string& cell = rec[slot.csv_index];
      if (cell.empty() && slot.spec.separator.empty())
        throw ParseError("row " + std::to_string(r + 1) + ", column '" + slot.spec.name + "': missing value", r + 1,
                         slot.spec.name);
      table.categorical[k].values.push_back(cell);
    }
    if (target_index) {
      const std::string& cell = rec[*target_index];
      if (cell.empty())
        throw ParseError("row " + std::to_string(r + 1) + ", column '" + target_spec.name + "': missing value", r + 1,
                         target_spec.name);
      table.targets.push_back(cell);
    }
  }
  return table;
}

inline RawTable load_csv(const std::string& path, const TableSchema& schema, LoadOptions opts = {}) {
  return table_from_csv_text(read_text_file(path), schema, opts);
}

}  // namespace examl

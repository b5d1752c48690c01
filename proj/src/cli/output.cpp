#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "chaosdesign/cli.hpp"
#include "chaosdesign/errors.hpp"

namespace chaosdesign::cli {

namespace {

using nlohmann::json;

std::string_view type_name(ColumnType t) {
  switch (t) {
    case ColumnType::Integer: return "integer";
    case ColumnType::Real: return "real";
    case ColumnType::Text: return "text";
  }
  return "text";
}

ColumnType parse_type(const std::string& s) {
  if (s == "integer") return ColumnType::Integer;
  if (s == "real") return ColumnType::Real;
  if (s == "text") return ColumnType::Text;
  throw ValidationError("unknown column type '" + s + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// RFC 4180 records; quoted fields may contain separators and newlines.
std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ValidationError("CSV: unterminated quoted field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

double parse_real(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("not a number: '" + s + "'");
  return v;
}

std::int64_t parse_integer(const std::string& s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("not an integer: '" + s + "'");
  return v;
}

Cell parse_cell(const std::string& s, ColumnType type) {
  if (s.empty()) return std::monostate{};
  switch (type) {
    case ColumnType::Integer: return parse_integer(s);
    case ColumnType::Real: return parse_real(s);
    case ColumnType::Text: return s;
  }
  return s;
}

std::string cell_text(const Cell& c) {
  if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
  if (std::holds_alternative<double>(c)) return format_real(std::get<double>(c));
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return "";
}

Cell real(double v) { return v; }
Cell integer(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::vector<Column> with_prefix(std::vector<Column> prefix, const std::vector<Column>& rest) {
  prefix.insert(prefix.end(), rest.begin(), rest.end());
  return prefix;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool same_cell(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a)) {
    const double y = std::get<double>(b);
    return (std::isnan(*x) && std::isnan(y)) || std::memcmp(x, &y, sizeof y) == 0;
  }
  return a == b;
}

bool same_table(const Table& a, const Table& b) {
  if (a.columns.size() != b.columns.size() || a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.columns.size(); ++i)
    if (a.columns[i].name != b.columns[i].name || a.columns[i].type != b.columns[i].type) return false;
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    if (a.rows[r].size() != b.rows[r].size()) return false;
    for (std::size_t c = 0; c < a.rows[r].size(); ++c)
      if (!same_cell(a.rows[r][c], b.rows[r][c])) return false;
  }
  return true;
}

std::string emit_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(t.columns[i].name);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_field(cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(const std::string& text, const std::vector<Column>& schema) {
  const auto records = split_csv(text);
  if (records.empty()) throw ValidationError("CSV: missing header");
  const auto& header = records.front();
  if (header.size() != schema.size()) throw ValidationError("CSV: header does not match the schema");
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (header[i] != schema[i].name)
      throw ValidationError("CSV: expected column '" + schema[i].name + "', found '" + header[i] + "'");
  Table t;
  t.columns = schema;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != schema.size())
      throw ValidationError("CSV: row " + std::to_string(r) + " has the wrong number of fields");
    std::vector<Cell> row;
    for (std::size_t i = 0; i < schema.size(); ++i) row.push_back(parse_cell(records[r][i], schema[i].type));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string emit_json(const Table& t) {
  json doc;
  doc["columns"] = json::array();
  for (const auto& c : t.columns) doc["columns"].push_back({{"name", c.name}, {"type", type_name(c.type)}});
  doc["rows"] = json::array();
  for (const auto& row : t.rows) {
    json jr = json::array();
    for (const auto& cell : row) {
      if (const auto* d = std::get_if<double>(&cell)) {
        // Non-finite reals travel as text so they survive the round trip.
        if (std::isfinite(*d)) {
          jr.push_back(*d);
        } else {
          jr.push_back(format_real(*d));
        }
      } else if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        jr.push_back(*i);
      } else if (const auto* s = std::get_if<std::string>(&cell)) {
        jr.push_back(*s);
      } else {
        jr.push_back(nullptr);
      }
    }
    doc["rows"].push_back(std::move(jr));
  }
  return doc.dump(2) + '\n';
}

Table parse_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("JSON: ") + e.what());
  }
  Table t;
  try {
    for (const auto& c : doc.at("columns"))
      t.columns.push_back({c.at("name").get<std::string>(), parse_type(c.at("type").get<std::string>())});
    for (const auto& jr : doc.at("rows")) {
      if (jr.size() != t.columns.size()) throw ValidationError("JSON: row has the wrong number of fields");
      std::vector<Cell> row;
      for (std::size_t i = 0; i < jr.size(); ++i) {
        const auto& v = jr[i];
        if (v.is_null()) {
          row.emplace_back(std::monostate{});
          continue;
        }
        switch (t.columns[i].type) {
          case ColumnType::Integer: row.emplace_back(v.get<std::int64_t>()); break;
          case ColumnType::Real:
            row.emplace_back(v.is_string() ? parse_real(v.get<std::string>()) : v.get<double>());
            break;
          case ColumnType::Text: row.emplace_back(v.get<std::string>()); break;
        }
      }
      t.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("JSON: ") + e.what());
  }
  return t;
}

std::vector<Column> frame_potential_schema() {
  return {{"k", ColumnType::Integer}, {"F_mean", ColumnType::Real},     {"F_stderr", ColumnType::Real},
          {"F_haar", ColumnType::Real}, {"delta_F", ColumnType::Real},  {"prediction", ColumnType::Real},
          {"p0", ColumnType::Real},     {"n_pairs", ColumnType::Integer}};
}

namespace {

std::vector<Column> sweep_body() {
  return {{"F_mean", ColumnType::Real},     {"F_stderr", ColumnType::Real},   {"F_haar", ColumnType::Real},
          {"delta_F", ColumnType::Real},    {"delta_F_stderr", ColumnType::Real},
          {"prediction", ColumnType::Real}, {"p0", ColumnType::Real},         {"n_pairs", ColumnType::Integer}};
}

void push_row_body(std::vector<Cell>& out, const FramePotentialRow& r) {
  out.push_back(real(r.estimate.mean));
  out.push_back(real(r.estimate.std_error));
  out.push_back(real(r.haar));
  out.push_back(real(r.delta));
  out.push_back(real(r.delta_error));
  out.push_back(real(r.prediction));
  out.push_back(real(r.p0));
  out.push_back(integer(r.estimate.n_pairs));
}

}  // namespace

std::vector<Column> time_sweep_schema() {
  auto cols = with_prefix({{"T", ColumnType::Real}, {"k", ColumnType::Integer}}, sweep_body());
  cols.push_back({"dE_T", ColumnType::Real});
  cols.push_back({"status", ColumnType::Text});
  return cols;
}

std::vector<Column> size_sweep_schema() {
  auto cols = with_prefix({{"k", ColumnType::Integer}, {"N", ColumnType::Integer}}, sweep_body());
  cols.push_back({"N_c", ColumnType::Integer});
  cols.push_back({"status", ColumnType::Text});
  return cols;
}

std::vector<Column> pauli_spectrum_schema() {
  return {{"N", ColumnType::Integer},         {"n", ColumnType::Integer},
          {"mean", ColumnType::Real},         {"variance", ColumnType::Real},
          {"excess_kurtosis", ColumnType::Real}, {"ks_to_gaussian", ColumnType::Real},
          {"expected_variance", ColumnType::Real}};
}

std::vector<Column> validation_schema() {
  return {{"check", ColumnType::Text}, {"status", ColumnType::Text}, {"detail", ColumnType::Text}};
}

Table frame_potential_table(const std::vector<FramePotentialRow>& rows) {
  Table t;
  t.columns = frame_potential_schema();
  for (const auto& r : rows) {
    t.rows.push_back({integer(static_cast<std::uint64_t>(r.estimate.k)), real(r.estimate.mean),
                      real(r.estimate.std_error), real(r.haar), real(r.delta), real(r.prediction),
                      real(r.p0), integer(r.estimate.n_pairs)});
  }
  return t;
}

Table time_sweep_table(const SweepResult& result, double level_spacing) {
  Table t;
  t.columns = time_sweep_schema();
  for (const auto& p : result.points) {
    std::vector<Cell> row{real(p.T), integer(static_cast<std::uint64_t>(p.row.estimate.k))};
    push_row_body(row, p.row);
    row.push_back(real(level_spacing * p.T));
    row.push_back(p.status);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table size_sweep_table(const SweepResult& result) {
  Table t;
  t.columns = size_sweep_schema();
  for (const auto& p : result.points) {
    std::vector<Cell> row{integer(static_cast<std::uint64_t>(p.row.estimate.k)), integer(p.n_qubits)};
    push_row_body(row, p.row);
    row.push_back(p.critical_size ? integer(*p.critical_size) : Cell{});
    row.push_back(p.status);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table pauli_spectrum_table(const GaussianityReport& report, unsigned n_qubits) {
  Table t;
  t.columns = pauli_spectrum_schema();
  t.rows.push_back({integer(n_qubits), integer(report.n), real(report.mean), real(report.variance),
                    real(report.excess_kurtosis), real(report.ks_to_gaussian),
                    real(report.expected_variance)});
  return t;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at " + path);
  }
}

std::string meta_path(const std::string& output) {
  std::filesystem::path p(output);
  p.replace_extension(".meta.json");
  return p.string();
}

}  // namespace chaosdesign::cli

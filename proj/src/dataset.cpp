#include "infoiter/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "infoiter/errors.hpp"

namespace infoiter {

namespace {

Column::Values empty_values(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::Integer: return std::vector<std::int64_t>{};
    case ScalarKind::Real: return std::vector<double>{};
    case ScalarKind::Label: return std::vector<std::string>{};
  }
  return std::vector<std::string>{};
}

struct Field {
  std::string text;
  bool quoted = false;
};

struct Record {
  std::vector<Field> fields;
  std::size_t line = 0;
};

std::vector<Record> split_records(const std::string& text) {
  std::vector<Record> records;
  Record current;
  Field field;
  std::size_t line = 1;
  current.line = line;
  bool in_quotes = false;
  bool after_quote = false;
  bool any = false;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field = Field{};
    after_quote = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(current));
    current = Record{};
    current.line = line;
    any = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.text.push_back(c);
      }
      continue;
    }
    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    if (c == ',') {
      end_field();
      any = true;
    } else if (c == '\n') {
      ++line;
      end_record();
    } else if (c == '"') {
      if (!field.text.empty() || after_quote) {
        throw Error(ErrorCode::IngestError,
                    "unexpected quote inside unquoted field at line " + std::to_string(line));
      }
      in_quotes = true;
      field.quoted = true;
    } else {
      if (after_quote) {
        throw Error(ErrorCode::IngestError,
                    "text after closing quote at line " + std::to_string(line));
      }
      field.text.push_back(c);
      any = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::IngestError, "unterminated quoted field starting at line " +
                                            std::to_string(current.line));
  }
  if (any || !field.text.empty() || field.quoted || !current.fields.empty()) end_record();
  // Trailing blank lines carry no record.
  while (!records.empty() && records.back().fields.size() == 1 &&
         records.back().fields[0].text.empty() && !records.back().fields[0].quoted) {
    records.pop_back();
  }
  return records;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  std::int64_t v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  double v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

ScalarKind infer_kind(const std::vector<Record>& rows, std::size_t col) {
  bool all_int = true;
  bool all_real = true;
  for (const auto& r : rows) {
    std::string cell = trim(r.fields[col].text);
    if (cell.empty()) continue;
    if (r.fields[col].quoted) return ScalarKind::Label;
    if (all_int && !parse_int(cell)) all_int = false;
    if (!parse_real(cell)) {
      all_real = false;
      break;
    }
  }
  if (all_int) return ScalarKind::Integer;
  if (all_real) return ScalarKind::Real;
  return ScalarKind::Label;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && !s.empty()) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Column::Column(std::string name, ScalarKind kind)
    : name_(std::move(name)), kind_(kind), values_(empty_values(kind)) {}

std::size_t Column::missing_count() const {
  return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), std::uint8_t{1}));
}

double Column::numeric(std::size_t row) const {
  if (const auto* ints = std::get_if<std::vector<std::int64_t>>(&values_)) {
    return static_cast<double>((*ints)[row]);
  }
  if (const auto* reals = std::get_if<std::vector<double>>(&values_)) return (*reals)[row];
  throw Error(ErrorCode::ParamError, "column '" + name_ + "' is not numeric");
}

ScalarValue Column::value(std::size_t row) const {
  return std::visit([row](const auto& v) -> ScalarValue { return v[row]; }, values_);
}

void Column::push(const ScalarValue& value) {
  if (kind_of(value) != kind_) {
    throw Error(ErrorCode::KindMismatch, "value " + format_scalar(value) + " pushed into " +
                                             std::string(scalar_kind_name(kind_)) + " column '" +
                                             name_ + "'");
  }
  std::visit(
      [&value](auto& v) {
        using Elem = typename std::decay_t<decltype(v)>::value_type;
        v.push_back(std::get<Elem>(value));
      },
      values_);
  missing_.push_back(0);
}

void Column::push_missing() {
  std::visit([](auto& v) { v.emplace_back(); }, values_);
  missing_.push_back(1);
}

Dataset::Dataset(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::set<std::string> names;
  for (const auto& c : columns_) {
    if (!names.insert(c.name()).second) {
      throw Error(ErrorCode::IngestError, "duplicate column name '" + c.name() + "'");
    }
  }
  if (!columns_.empty()) {
    rows_ = columns_.front().size();
    for (const auto& c : columns_) {
      if (c.size() != rows_) {
        throw Error(ErrorCode::IngestError, "column '" + c.name() + "' has " +
                                                std::to_string(c.size()) + " rows, expected " +
                                                std::to_string(rows_));
      }
    }
  }
}

const Column& Dataset::column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.name() == name) return c;
  }
  throw Error(ErrorCode::ParamError, "dataset has no column '" + name + "'");
}

bool Dataset::has_column(const std::string& name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name() == name; });
}

Dataset parse_csv_text(const std::string& text, const SchemaHints& hints) {
  auto records = split_records(text);
  if (records.empty()) throw Error(ErrorCode::IngestError, "CSV input has no header row");

  const Record& header = records.front();
  std::vector<Record> rows(records.begin() + 1, records.end());
  const std::size_t width = header.fields.size();
  for (const auto& r : rows) {
    if (r.fields.size() != width) {
      throw Error(ErrorCode::IngestError, "line " + std::to_string(r.line) + " has " +
                                              std::to_string(r.fields.size()) +
                                              " fields, header has " + std::to_string(width));
    }
  }
  for (const auto& [name, kind] : hints) {
    bool found = std::any_of(header.fields.begin(), header.fields.end(),
                             [&](const Field& f) { return trim(f.text) == name; });
    if (!found) throw Error(ErrorCode::ParamError, "schema hint for unknown column '" + name + "'");
  }

  std::vector<Column> columns;
  columns.reserve(width);
  for (std::size_t c = 0; c < width; ++c) {
    std::string name = trim(header.fields[c].text);
    if (name.empty()) throw Error(ErrorCode::IngestError, "empty column name in header");
    auto hint = hints.find(name);
    ScalarKind kind = hint != hints.end() ? hint->second : infer_kind(rows, c);
    Column col(name, kind);
    for (const auto& r : rows) {
      const Field& f = r.fields[c];
      std::string cell = kind == ScalarKind::Label ? f.text : trim(f.text);
      if (cell.empty()) {
        col.push_missing();
        continue;
      }
      auto where = [&] {
        return "line " + std::to_string(r.line) + ", column '" + name + "'";
      };
      switch (kind) {
        case ScalarKind::Integer:
          if (auto v = parse_int(cell)) {
            col.push(*v);
          } else if (parse_real(cell)) {
            throw Error(ErrorCode::KindMismatch,
                        "non-integral value '" + cell + "' in integer column at " + where());
          } else {
            throw Error(ErrorCode::IngestError,
                        "non-numeric value '" + cell + "' in integer column at " + where());
          }
          break;
        case ScalarKind::Real:
          if (auto v = parse_real(cell)) {
            col.push(*v);
          } else {
            throw Error(ErrorCode::IngestError,
                        "non-numeric value '" + cell + "' in real column at " + where());
          }
          break;
        case ScalarKind::Label:
          col.push(cell);
          break;
      }
    }
    columns.push_back(std::move(col));
  }
  return Dataset(std::move(columns));
}

Dataset parse_csv(std::istream& in, const SchemaHints& hints) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_text(buf.str(), hints);
}

Dataset load_csv(const std::filesystem::path& path, const SchemaHints& hints) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IngestError, "cannot open '" + path.string() + "'");
  return parse_csv(in, hints);
}

std::string to_csv(const Dataset& data) {
  std::string out;
  const auto& cols = data.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out.push_back(',');
    out += csv_escape(cols[c].name());
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out.push_back(',');
      if (cols[c].is_missing(r)) continue;
      ScalarValue v = cols[c].value(r);
      if (const auto* s = std::get_if<std::string>(&v)) {
        out += csv_escape(*s);
      } else if (const auto* d = std::get_if<double>(&v)) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), *d);
        out.append(buf, res.ptr);
      } else {
        out += std::to_string(std::get<std::int64_t>(v));
      }
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace infoiter

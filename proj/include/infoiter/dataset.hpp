#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "infoiter/outcome.hpp"

namespace infoiter {

/// One homogeneous column with per-cell missingness. Missing cells hold a
/// default value that tools must not read.
class Column {
 public:
  using Values = std::variant<std::vector<std::int64_t>, std::vector<double>, std::vector<std::string>>;

  Column(std::string name, ScalarKind kind);

  const std::string& name() const noexcept { return name_; }
  ScalarKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return missing_.size(); }

  bool is_missing(std::size_t row) const { return missing_[row] != 0; }
  std::size_t missing_count() const;

  /// Numeric view of a non-missing integer or real cell.
  double numeric(std::size_t row) const;
  ScalarValue value(std::size_t row) const;

  void push(const ScalarValue& value);
  void push_missing();

  const Values& values() const noexcept { return values_; }

  friend bool operator==(const Column&, const Column&) = default;

 private:
  std::string name_;
  ScalarKind kind_;
  Values values_;
  std::vector<std::uint8_t> missing_;
};

class Dataset {
 public:
  Dataset() = default;

  /// Throws IngestError when the columns disagree in length or repeat a name.
  explicit Dataset(std::vector<Column> columns);

  std::size_t rows() const noexcept { return rows_; }
  const std::vector<Column>& columns() const noexcept { return columns_; }

  /// Throws ParamError when absent.
  const Column& column(const std::string& name) const;
  bool has_column(const std::string& name) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

/// Column kind overrides, by column name. Columns without a hint are
/// inferred: integer if every present cell parses as an integer, else real if
/// every present cell parses as a number, else label.
using SchemaHints = std::map<std::string, ScalarKind>;

/// RFC 4180 style CSV with a header row. Empty cells are missing.
/// Throws IngestError (with the 1-based file line) on malformed rows or on
/// non-numeric text in a numeric column, and KindMismatch when a hinted
/// integer column holds non-integral numbers.
Dataset load_csv(const std::filesystem::path& path, const SchemaHints& hints = {});
Dataset parse_csv(std::istream& in, const SchemaHints& hints = {});
Dataset parse_csv_text(const std::string& text, const SchemaHints& hints = {});

std::string to_csv(const Dataset& data);

}  // namespace infoiter

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridline::csv {

/// A header-indexed CSV table. Quoting is not supported: fields are split on
/// commas and trimmed of surrounding whitespace. Blank lines and lines
/// starting with '#' are skipped.
class Table {
 public:
  static Table read(const std::filesystem::path& path);
  static Table parse(std::string_view text, std::string source_name);

  const std::string& source() const noexcept { return source_; }
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t size() const noexcept { return rows_.size(); }

  std::optional<std::size_t> column(std::string_view name) const;
  /// Throws InputError naming the file when the column is absent.
  std::size_t require_column(std::string_view name) const;

  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }
  /// 1-based line number in the source file of data row `i`.
  std::size_t line_of(std::size_t i) const { return lines_[i]; }

  /// Field accessors; `i` is the data-row index. Errors name file and line.
  const std::string& text(std::size_t i, std::size_t col) const;
  double number(std::size_t i, std::size_t col) const;
  long long integer(std::size_t i, std::size_t col) const;
  /// Empty field -> nullopt.
  std::optional<double> optional_number(std::size_t i, std::size_t col) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

/// Shortest round-trip decimal text for a double.
std::string format_number(double value);
/// Fixed-point text with `digits` decimals; negative zero prints as zero.
std::string format_fixed(double value, int digits);

}  // namespace gridline::csv

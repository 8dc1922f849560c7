#include "gridline/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gridline/error.hpp"

namespace gridline::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Table Table::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

Table Table::parse(std::string_view text, std::string source_name) {
  Table table;
  table.source_ = std::move(source_name);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    const auto trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = split(trimmed);
    if (!have_header) {
      table.header_ = std::move(fields);
      have_header = true;
      continue;
    }
    // Trailing empty optional columns may be omitted entirely.
    if (fields.size() > table.header_.size()) {
      bool extra_blank = true;
      for (std::size_t k = table.header_.size(); k < fields.size(); ++k) extra_blank = extra_blank && fields[k].empty();
      if (!extra_blank) {
        throw InputError(table.source_, line_no, "row has more fields than the header");
      }
      fields.resize(table.header_.size());
    }
    fields.resize(table.header_.size());
    table.rows_.push_back(std::move(fields));
    table.lines_.push_back(line_no);
  }
  if (!have_header) throw InputError(table.source_, 0, "missing header row");
  return table;
}

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
  if (auto c = column(name)) return *c;
  throw InputError(source_, 0, "missing column '" + std::string(name) + "'");
}

const std::string& Table::text(std::size_t i, std::size_t col) const { return rows_.at(i).at(col); }

double Table::number(std::size_t i, std::size_t col) const {
  const auto& field = text(i, col);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw InputError(source_, line_of(i), "column '" + header_[col] + "': expected a number, got '" + field + "'");
  }
  return value;
}

long long Table::integer(std::size_t i, std::size_t col) const {
  const auto& field = text(i, col);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw InputError(source_, line_of(i), "column '" + header_[col] + "': expected an integer, got '" + field + "'");
  }
  return value;
}

std::optional<double> Table::optional_number(std::size_t i, std::size_t col) const {
  if (text(i, col).empty()) return std::nullopt;
  return number(i, col);
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  std::string out(buf);
  // Collapse "-0.000" to "0.000" so sign noise never leaks into outputs.
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

}  // namespace gridline::csv

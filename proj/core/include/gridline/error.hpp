#pragma once

#include <stdexcept>
#include <string>

namespace gridline {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. Carries the offending file and
/// 1-based data row (0 when the problem is not tied to a row).
class InputError : public Error {
 public:
  InputError(std::string file, std::size_t row, const std::string& what)
      : Error(file + (row > 0 ? ":" + std::to_string(row) : std::string{}) + ": " + what),
        file_(std::move(file)),
        row_(row) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::string file_;
  std::size_t row_;
};

/// A computation was asked to leave its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridline

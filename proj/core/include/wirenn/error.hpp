#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wirenn {

/// Raised when a table (ternary or exact-match) would exceed its configured entry cap.
class TableTooLarge : public std::runtime_error {
 public:
  TableTooLarge(const std::string& what, std::uint64_t required)
      : std::runtime_error(what + " (requires " + std::to_string(required) + " entries)"),
        required_(required) {}
  std::uint64_t required() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

class CountOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Malformed or inconsistent input files and models.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wirenn

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace nlrt::app {

/// Builds a CSV body in memory. Doubles use the shortest round-trip form, so
/// identical values always print identically.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);

  Csv& operator<<(double v);
  Csv& operator<<(std::int64_t v);
  Csv& operator<<(std::uint64_t v);
  Csv& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
  Csv& operator<<(bool v) { return cell(v ? "true" : "false"); }
  Csv& operator<<(const std::string& v) { return cell(v); }
  Csv& operator<<(const char* v) { return cell(v); }

  /// Ends the current row; throws if the cell count differs from the header.
  void end_row();

  const std::string& text() const noexcept { return text_; }
  std::size_t columns() const noexcept { return columns_; }

 private:
  Csv& cell(std::string_view v);

  std::size_t columns_;
  std::size_t filled_ = 0;
  std::string text_;
};

std::string format_double(double v);

}  // namespace nlrt::app

#include "nlrt_app/csv.hpp"

#include <stdexcept>

namespace nlrt::app {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

Csv& Csv::cell(std::string_view v) {
  if (filled_ > 0) text_ += ',';
  if (v.find_first_of(",\"\n") != std::string_view::npos) {
    text_ += '"';
    for (char ch : v) {
      if (ch == '"') text_ += '"';
      text_ += ch;
    }
    text_ += '"';
  } else {
    text_ += v;
  }
  ++filled_;
  return *this;
}

Csv& Csv::operator<<(double v) { return cell(format_double(v)); }

Csv& Csv::operator<<(std::int64_t v) { return cell(std::to_string(v)); }

Csv& Csv::operator<<(std::uint64_t v) { return cell(std::to_string(v)); }

void Csv::end_row() {
  if (filled_ != columns_)
    throw std::logic_error("csv row has " + std::to_string(filled_) + " cells, header has " +
                           std::to_string(columns_));
  text_ += '\n';
  filled_ = 0;
}

}  // namespace nlrt::app

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cascade {

// Shortest round-trip decimal rendering ('.' decimal point, no locale).
std::string format_double(double v);
std::string format_int(std::int64_t v);

// Minimal RFC-4180 writer: comma separated, LF line endings, fields quoted
// only when they contain a comma, quote or newline.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

std::string csv_escape(std::string_view field);

}  // namespace cascade

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace patrol::csv {

using Row = std::vector<std::string>;

/// RFC-4180 reader: quoted fields may contain commas, doubled quotes and newlines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record; returns false at end of input.
  bool next(Row& row);

  /// 1-based line number where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

std::string quote(std::string_view field);
void write_row(std::ostream& out, const Row& row);

}  // namespace patrol::csv

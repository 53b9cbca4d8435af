#pragma once

// Minimal CSV plumbing shared by every file format in the pipeline. Fields
// never contain commas or quotes (ids and codes are plain tokens), so no
// quoting is supported.

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace relsim::csv {

/// Split one line on commas. A trailing '\r' is dropped.
std::vector<std::string_view> split(std::string_view line);

/// Shortest decimal form with 17 significant digits; parses back to the
/// identical double.
std::string format_double(double v);

/// Throws DataError naming `context` when `s` is not a finite number.
double parse_double(std::string_view s, std::string_view context);
long long parse_int(std::string_view s, std::string_view context);

std::string join(const std::vector<std::string>& fields);

/// Opens for reading; throws DataError when the file cannot be opened.
std::ifstream open_input(const std::filesystem::path& path);
/// Opens for writing (creating parent directories); throws DataError on failure.
std::ofstream open_output(const std::filesystem::path& path);

/// Reads the header line and throws DataError unless it equals `expected`.
void expect_header(std::istream& in, std::string_view expected, std::string_view source);

/// Line-by-line reader that tracks 1-based line numbers and skips blank lines.
class LineReader {
 public:
  /// `consumed` counts lines already read from `in` (usually the header).
  explicit LineReader(std::istream& in, std::size_t consumed = 0)
      : in_(in), line_number_(consumed) {}

  bool next(std::string& line);
  std::size_t line_number() const { return line_number_; }

 private:
  std::istream& in_;
  std::size_t line_number_ = 0;
};

}  // namespace relsim::csv

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqd/pedigree.hpp"

namespace eqd {

/// Minimal comma-separated reader: one header line, then rows of fields.
/// Blank lines and lines starting with '#' are skipped; fields are trimmed.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in);

  /// Reads the header and checks it equals `expected` (case-insensitive).
  void expect_header(std::span<const std::string_view> expected);

  /// Next data row; false at end of input.
  bool next(std::vector<std::string>& fields);

  std::size_t line() const noexcept { return line_; }

 private:
  bool next_line(std::string& text);

  std::istream& in_;
  std::size_t line_ = 0;
};

std::int64_t parse_int(std::string_view field, std::size_t line);
double parse_double(std::string_view field, std::size_t line);

/// Shortest round-trip text for a double.
std::string format_double(double value);

struct EbvEntry {
  IndividualId id = 0;
  double ebv = 0.0;
};

/// CSV `id,ebv`.
std::vector<EbvEntry> read_ebv(std::istream& in);
std::vector<EbvEntry> load_ebv(const std::filesystem::path& path);
void write_ebv(std::ostream& out, std::span<const EbvEntry> entries);

struct BoundEntry {
  IndividualId id = 0;
  double lower = 0.0;
  double upper = 1.0;
};

/// CSV `id,lower,upper`.
std::vector<BoundEntry> read_bounds(std::istream& in);
std::vector<BoundEntry> load_bounds(const std::filesystem::path& path);

/// `key = value` lines; '#' starts a comment. Keys are kept verbatim.
std::map<std::string, std::string> read_config(std::istream& in);
std::map<std::string, std::string> load_config(const std::filesystem::path& path);

}  // namespace eqd

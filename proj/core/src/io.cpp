#include "eqd/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "eqd/error.hpp"

namespace eqd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) ==
           std::tolower(static_cast<unsigned char>(y));
  });
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string(), 0);
  }
  return in;
}

}  // namespace

CsvReader::CsvReader(std::istream& in) : in_(in) {}

bool CsvReader::next_line(std::string& text) {
  while (std::getline(in_, text)) {
    ++line_;
    if (line_ == 1 && text.size() >= 3 &&
        static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB &&
        static_cast<unsigned char>(text[2]) == 0xBF) {
      text.erase(0, 3);
    }
    if (!text.empty() && text.back() == '\r') {
      text.pop_back();
    }
    const auto body = trim(text);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    return true;
  }
  return false;
}

void CsvReader::expect_header(std::span<const std::string_view> expected) {
  std::vector<std::string> fields;
  if (!next(fields)) {
    throw ParseError("missing header", line_);
  }
  bool ok = fields.size() == expected.size();
  for (std::size_t i = 0; ok && i < fields.size(); ++i) {
    ok = iequals(fields[i], expected[i]);
  }
  if (!ok) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      want += (i ? "," : "") + std::string(expected[i]);
    }
    throw ParseError("expected header '" + want + "'", line_);
  }
}

bool CsvReader::next(std::vector<std::string>& fields) {
  std::string text;
  if (!next_line(text)) {
    return false;
  }
  fields.clear();
  std::string_view rest(text);
  while (true) {
    const auto comma = rest.find(',');
    fields.emplace_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) {
      break;
    }
    rest.remove_prefix(comma + 1);
  }
  return true;
}

std::int64_t parse_int(std::string_view field, std::size_t line) {
  std::int64_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("not an integer: '" + std::string(field) + "'", line);
  }
  return value;
}

double parse_double(std::string_view field, std::size_t line) {
  double value = 0.0;
  if (!field.empty() && field.front() == '+') {
    field.remove_prefix(1);
  }
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty() || !std::isfinite(value)) {
    throw ParseError("not a finite number: '" + std::string(field) + "'", line);
  }
  return value;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ec == std::errc() ? ptr : buf.data());
}

std::vector<EbvEntry> read_ebv(std::istream& in) {
  CsvReader csv(in);
  constexpr std::array<std::string_view, 2> header{"id", "ebv"};
  csv.expect_header(header);
  std::vector<EbvEntry> out;
  std::unordered_set<IndividualId> seen;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != 2) {
      throw ParseError("expected 2 fields", csv.line());
    }
    EbvEntry e{parse_int(f[0], csv.line()), parse_double(f[1], csv.line())};
    if (!seen.insert(e.id).second) {
      throw DuplicateIdError("duplicate EBV for id " + std::to_string(e.id));
    }
    out.push_back(e);
  }
  return out;
}

std::vector<EbvEntry> load_ebv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_ebv(in);
}

void write_ebv(std::ostream& out, std::span<const EbvEntry> entries) {
  out << "id,ebv\n";
  for (const auto& e : entries) {
    out << e.id << ',' << format_double(e.ebv) << '\n';
  }
}

std::vector<BoundEntry> read_bounds(std::istream& in) {
  CsvReader csv(in);
  constexpr std::array<std::string_view, 3> header{"id", "lower", "upper"};
  csv.expect_header(header);
  std::vector<BoundEntry> out;
  std::unordered_set<IndividualId> seen;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != 3) {
      throw ParseError("expected 3 fields", csv.line());
    }
    BoundEntry b{parse_int(f[0], csv.line()), parse_double(f[1], csv.line()),
                 parse_double(f[2], csv.line())};
    if (!seen.insert(b.id).second) {
      throw DuplicateIdError("duplicate bounds for id " + std::to_string(b.id));
    }
    out.push_back(b);
  }
  return out;
}

std::vector<BoundEntry> load_bounds(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_bounds(in);
}

std::map<std::string, std::string> read_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (const auto hash = text.find('#'); hash != std::string::npos) {
      text.erase(hash);
    }
    const auto body = trim(text);
    if (body.empty()) {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected key = value", line);
    }
    const auto key = trim(body.substr(0, eq));
    if (key.empty()) {
      throw ParseError("empty key", line);
    }
    out[std::string(key)] = std::string(trim(body.substr(eq + 1)));
  }
  return out;
}

std::map<std::string, std::string> load_config(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_config(in);
}

}  // namespace eqd

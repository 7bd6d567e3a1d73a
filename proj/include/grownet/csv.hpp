#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "grownet/errors.hpp"

namespace grownet {

// Line-oriented reader for the plain comma-separated formats used by the
// toolkit (opaque tokens, no quoting). Tracks line numbers for diagnostics
// and tolerates a trailing CR on each line.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string label) : in_(in), label_(std::move(label)) {}

  // Reads one row into `fields` (views into an internal buffer, valid until
  // the next call). Returns false at end of input. Throws ParseError if the
  // row does not have exactly `expect_fields` fields.
  bool next_row(std::vector<std::string_view>& fields, size_t expect_fields);

  // Reads and validates the header row.
  void expect_header(std::string_view header);

  size_t line_number() const { return line_; }
  const std::string& label() const { return label_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(label_ + ":" + std::to_string(line_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::string label_;
  std::string buf_;
  size_t line_ = 0;
};

inline bool CsvReader::next_row(std::vector<std::string_view>& fields, size_t expect_fields) {
  fields.clear();
  while (std::getline(in_, buf_)) {
    ++line_;
    if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
    if (buf_.empty()) continue;  // skip blank lines
    std::string_view row(buf_);
    size_t start = 0;
    while (true) {
      size_t comma = row.find(',', start);
      if (comma == std::string_view::npos) {
        fields.push_back(row.substr(start));
        break;
      }
      fields.push_back(row.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != expect_fields)
      fail("expected " + std::to_string(expect_fields) + " fields, got " +
           std::to_string(fields.size()));
    return true;
  }
  return false;
}

inline void CsvReader::expect_header(std::string_view header) {
  std::vector<std::string_view> fields;
  size_t n = 1;
  for (char c : header)
    if (c == ',') ++n;
  if (!next_row(fields, n)) fail("missing header row");
  std::string joined;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) joined += ',';
    joined += fields[i];
  }
  if (joined != header) fail("expected header '" + std::string(header) + "', got '" + joined + "'");
}

}  // namespace grownet

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace abma::io {

using json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, so readers never observe a
/// partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

/// One parsed CSV record with the 1-based physical line it started on.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// RFC-4180 parser: quoted fields may contain commas, CRLF and doubled quotes.
std::vector<CsvRow> parse_csv(std::string_view text);
std::string csv_field(std::string_view value);
std::string csv_line(const std::vector<std::string>& fields);

/// One non-blank JSONL line parsed as an object.
struct JsonLine {
  std::size_t line = 0;
  json value;
};

std::vector<JsonLine> parse_jsonl(std::string_view text);
std::string to_jsonl(const std::vector<json>& records);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace abma::io

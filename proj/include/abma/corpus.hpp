#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abma/io.hpp"

namespace abma::corpus {

using Date = std::chrono::year_month_day;

/// Accepts `YYYY-MM-DD` and `MM/DD/YYYY`; rejects impossible calendar dates.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);

struct Transcript {
  std::string company_name;
  std::string ticker;
  Date call_date;
  std::string body;

  /// `TICKER@YYYY-MM-DD`; unique within a loaded corpus.
  std::string id() const;
};

struct Sentence {
  std::string transcript_id;
  std::size_t index = 0;
  std::string text;
};

struct Rejection {
  std::size_t row = 0;   // 1-based data row (header excluded)
  std::size_t line = 0;  // physical line in the source file
  std::string reason;
};

struct LoadResult {
  std::vector<Transcript> transcripts;
  std::vector<Rejection> rejections;
  std::size_t total_rows = 0;
};

enum class Format { Csv, Jsonl };

Format format_from_path(const std::filesystem::path& path);

/// Rows with blank or malformed required fields become rejection records.
/// Duplicate (ticker, call_date) keys are fatal.
LoadResult load_transcripts(const std::filesystem::path& path, Format format);
LoadResult parse_transcripts(std::string_view text, Format format);

/// Rule-based splitter: breaks after `.`, `!` or `?` (plus closing quotes or
/// brackets) when followed by whitespace and an uppercase letter or digit.
/// Never breaks after a stop-listed abbreviation or inside a number.
std::vector<Sentence> split_sentences(const Transcript& transcript);
std::vector<std::string> split_text(std::string_view body);

struct CorpusStats {
  std::size_t transcript_count = 0;
  std::size_t company_count = 0;
  std::size_t sentence_count = 0;
  std::optional<Date> first_date;
  std::optional<Date> last_date;
};

CorpusStats corpus_stats(const std::vector<Transcript>& corpus, const std::vector<Sentence>& sentences);

io::json to_json(const Sentence& s);
Sentence sentence_from_json(const io::json& j);
io::json to_json(const CorpusStats& stats);
io::json to_json(const Rejection& r);
/// Transcript metadata without the body.
io::json metadata_json(const Transcript& t);

}  // namespace abma::corpus

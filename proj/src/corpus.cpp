#include "abma/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>

#include "abma/error.hpp"
#include "abma/io.hpp"

namespace abma::corpus {

namespace {

constexpr std::array<std::string_view, 4> kColumns = {"company_name", "ticker", "call_date", "body"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::optional<int> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  for (char c : s)
    if (!is_digit(c)) return std::nullopt;
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

const std::set<std::string_view>& abbreviations() {
  static const std::set<std::string_view> kList = {
      "Inc.", "Corp.", "Co.", "Ltd.", "Mr.", "Mrs.", "Ms.", "Dr.", "Jr.", "Sr.", "St.", "vs.", "No.",
      "Q1.",  "Q2.",   "Q3.", "Q4.",  "U.S.", "U.K.", "e.g.", "i.e."};
  return kList;
}

/// Token ending at `dot` (inclusive), with leading opening punctuation removed.
std::string_view token_before(std::string_view body, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(body[b - 1])) --b;
  while (b < dot && is_opener(body[b])) ++b;
  return body.substr(b, dot - b + 1);
}

struct Field {
  std::string value;
  bool present = false;
};

void add_row(LoadResult& out, std::size_t row, std::size_t line, const std::array<Field, 4>& fields) {
  ++out.total_rows;
  auto reject = [&](std::string reason) { out.rejections.push_back({row, line, std::move(reason)}); };
  for (std::size_t i = 0; i < 3; ++i) {
    if (!fields[i].present) return reject("missing field: " + std::string(kColumns[i]));
    if (trim(fields[i].value).empty()) return reject("empty " + std::string(kColumns[i]));
  }
  if (!fields[3].present) return reject("missing field: body");
  if (trim(fields[3].value).empty()) return reject("empty body");
  auto date = parse_date(trim(fields[2].value));
  if (!date) return reject("invalid call_date: " + fields[2].value);
  Transcript t;
  t.company_name = std::string(trim(fields[0].value));
  t.ticker = std::string(trim(fields[1].value));
  t.call_date = *date;
  t.body = fields[3].value;
  out.transcripts.push_back(std::move(t));
}

void check_duplicates(const LoadResult& result, const std::vector<std::size_t>& rows) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < result.transcripts.size(); ++i) groups[result.transcripts[i].id()].push_back(rows[i]);
  for (const auto& [key, where] : groups) {
    if (where.size() < 2) continue;
    const auto& t = *std::find_if(result.transcripts.begin(), result.transcripts.end(),
                                  [&](const Transcript& x) { return x.id() == key; });
    std::string msg = "duplicate (ticker, call_date) key (" + t.ticker + ", " + format_date(t.call_date) + ") on rows";
    for (auto r : where) msg += " " + std::to_string(r);
    throw DataError(msg);
  }
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  int y = 0;
  int m = 0;
  int d = 0;
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    auto yy = parse_int(text.substr(0, 4));
    auto mm = parse_int(text.substr(5, 2));
    auto dd = parse_int(text.substr(8, 2));
    if (!yy || !mm || !dd) return std::nullopt;
    y = *yy, m = *mm, d = *dd;
  } else if (text.size() == 10 && text[2] == '/' && text[5] == '/') {
    auto mm = parse_int(text.substr(0, 2));
    auto dd = parse_int(text.substr(3, 2));
    auto yy = parse_int(text.substr(6, 4));
    if (!yy || !mm || !dd) return std::nullopt;
    y = *yy, m = *mm, d = *dd;
  } else {
    return std::nullopt;
  }
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::string Transcript::id() const { return ticker + "@" + format_date(call_date); }

Format format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv") return Format::Csv;
  if (ext == ".jsonl" || ext == ".ndjson") return Format::Jsonl;
  throw UsageError("cannot infer transcript format from extension: " + path.string());
}

LoadResult load_transcripts(const std::filesystem::path& path, Format format) {
  return parse_transcripts(io::read_file(path), format);
}

LoadResult parse_transcripts(std::string_view text, Format format) {
  LoadResult out;
  std::vector<std::size_t> accepted_rows;
  auto accept_track = [&](std::size_t row, std::size_t line, const std::array<Field, 4>& fields) {
    std::size_t before = out.transcripts.size();
    add_row(out, row, line, fields);
    if (out.transcripts.size() > before) accepted_rows.push_back(row);
  };

  if (format == Format::Csv) {
    auto rows = io::parse_csv(text);
    if (rows.empty()) return out;
    std::array<std::optional<std::size_t>, 4> col;
    for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
      auto name = trim(rows[0].fields[i]);
      for (std::size_t c = 0; c < kColumns.size(); ++c)
        if (name == kColumns[c]) col[c] = i;
    }
    for (std::size_t c = 0; c < kColumns.size(); ++c)
      if (!col[c]) throw DataError("CSV header is missing column: " + std::string(kColumns[c]));
    for (std::size_t r = 1; r < rows.size(); ++r) {
      std::array<Field, 4> fields;
      for (std::size_t c = 0; c < 4; ++c) {
        if (*col[c] < rows[r].fields.size()) fields[c] = {rows[r].fields[*col[c]], true};
      }
      accept_track(r, rows[r].line, fields);
    }
  } else {
    auto lines = io::parse_jsonl(text);
    std::size_t row = 0;
    for (const auto& l : lines) {
      ++row;
      std::array<Field, 4> fields;
      for (std::size_t c = 0; c < 4; ++c) {
        auto it = l.value.find(std::string(kColumns[c]));
        if (it != l.value.end() && it->is_string()) fields[c] = {it->get<std::string>(), true};
      }
      accept_track(row, l.line, fields);
    }
  }
  check_duplicates(out, accepted_rows);
  return out;
}

std::vector<std::string> split_text(std::string_view body) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < body.size() && is_space(body[start])) ++start;
  std::size_t i = start;
  while (i < body.size()) {
    if (!is_terminator(body[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < body.size() && is_terminator(body[run_end])) ++run_end;
    std::size_t j = run_end;
    while (j < body.size() && is_closer(body[j])) ++j;
    if (j >= body.size() || !is_space(body[j])) {
      i = run_end;
      continue;
    }
    std::size_t k = j;
    while (k < body.size() && is_space(body[k])) ++k;
    std::size_t probe = k;
    while (probe < body.size() && is_opener(body[probe])) ++probe;
    bool next_ok = probe < body.size() && (is_upper(body[probe]) || is_digit(body[probe]));
    bool abbreviated = run_end - i == 1 && body[i] == '.' && abbreviations().count(token_before(body, i));
    if (next_ok && !abbreviated) {
      out.emplace_back(trim(body.substr(start, j - start)));
      start = k;
    }
    i = k;
  }
  auto tail = trim(body.substr(std::min(start, body.size())));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

std::vector<Sentence> split_sentences(const Transcript& transcript) {
  auto parts = split_text(transcript.body);
  std::vector<Sentence> out;
  out.reserve(parts.size());
  auto id = transcript.id();
  for (std::size_t i = 0; i < parts.size(); ++i) out.push_back({id, i, std::move(parts[i])});
  return out;
}

CorpusStats corpus_stats(const std::vector<Transcript>& corpus, const std::vector<Sentence>& sentences) {
  CorpusStats stats;
  stats.transcript_count = corpus.size();
  stats.sentence_count = sentences.size();
  std::set<std::string> tickers;
  for (const auto& t : corpus) {
    tickers.insert(t.ticker);
    if (!stats.first_date || t.call_date < *stats.first_date) stats.first_date = t.call_date;
    if (!stats.last_date || t.call_date > *stats.last_date) stats.last_date = t.call_date;
  }
  stats.company_count = tickers.size();
  return stats;
}

io::json to_json(const Sentence& s) {
  return {{"transcript_id", s.transcript_id}, {"index", s.index}, {"text", s.text}};
}

Sentence sentence_from_json(const io::json& j) {
  try {
    return {j.at("transcript_id").get<std::string>(), j.at("index").get<std::size_t>(), j.at("text").get<std::string>()};
  } catch (const nlohmann::ordered_json::exception& e) {
    throw DataError(std::string("malformed sentence record: ") + e.what());
  }
}

io::json to_json(const CorpusStats& stats) {
  io::json j = {{"transcript_count", stats.transcript_count},
                      {"company_count", stats.company_count},
                      {"sentence_count", stats.sentence_count}};
  if (stats.first_date)
    j["date_range"] = {format_date(*stats.first_date), format_date(*stats.last_date)};
  else
    j["date_range"] = nullptr;
  return j;
}

io::json to_json(const Rejection& r) { return {{"row", r.row}, {"line", r.line}, {"reason", r.reason}}; }

io::json metadata_json(const Transcript& t) {
  return {{"transcript_id", t.id()},
          {"company_name", t.company_name},
          {"ticker", t.ticker},
          {"call_date", format_date(t.call_date)}};
}

}  // namespace abma::corpus

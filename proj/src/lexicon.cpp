#include "abma/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <queue>
#include <set>

#include "abma/error.hpp"
#include "abma/io.hpp"

namespace abma::lexicon {

namespace {

bool is_word(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
char fold(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

/// Sentence text with whitespace runs collapsed to one space, plus the
/// mapping from each collapsed position back to original byte offsets.
struct Stream {
  std::string folded;
  std::string exact;
  std::vector<std::size_t> begin;
  std::vector<std::size_t> end;
};

Stream collapse(std::string_view text) {
  Stream s;
  s.folded.reserve(text.size());
  s.exact.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      std::size_t j = i;
      while (j < text.size() && is_space(text[j])) ++j;
      s.folded.push_back(' ');
      s.exact.push_back(' ');
      s.begin.push_back(i);
      s.end.push_back(j);
      i = j;
    } else {
      s.folded.push_back(fold(text[i]));
      s.exact.push_back(text[i]);
      s.begin.push_back(i);
      s.end.push_back(i + 1);
      ++i;
    }
  }
  return s;
}

}  // namespace

/// Byte-level Aho-Corasick automaton with a dense transition table.
class AhoCorasick {
 public:
  explicit AhoCorasick(const std::vector<std::string>& patterns) {
    nodes_.emplace_back();
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      std::int32_t cur = 0;
      for (unsigned char c : patterns[p]) {
        if (nodes_[cur].next[c] < 0) {
          nodes_[cur].next[c] = static_cast<std::int32_t>(nodes_.size());
          nodes_.emplace_back();
          nodes_.back().depth = nodes_[cur].depth + 1;
        }
        cur = nodes_[cur].next[c];
      }
      nodes_[cur].out.push_back(p);
    }
    std::queue<std::int32_t> bfs;
    for (int c = 0; c < 256; ++c) {
      auto& nx = nodes_[0].next[c];
      if (nx < 0) {
        nx = 0;
      } else {
        nodes_[nx].fail = 0;
        bfs.push(nx);
      }
    }
    while (!bfs.empty()) {
      auto u = bfs.front();
      bfs.pop();
      auto f = nodes_[u].fail;
      auto& out = nodes_[u].out;
      out.insert(out.end(), nodes_[f].out.begin(), nodes_[f].out.end());
      for (int c = 0; c < 256; ++c) {
        auto v = nodes_[u].next[c];
        if (v < 0) {
          nodes_[u].next[c] = nodes_[f].next[c];
        } else {
          nodes_[v].fail = nodes_[f].next[c];
          bfs.push(v);
        }
      }
    }
  }

  /// Calls `emit(pattern, end)` for every occurrence; `end` is one past the last byte.
  template <typename Emit>
  void scan(std::string_view text, Emit&& emit) const {
    std::int32_t cur = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      cur = nodes_[cur].next[static_cast<unsigned char>(text[i])];
      for (auto p : nodes_[cur].out) emit(p, i + 1);
    }
  }

 private:
  struct Node {
    Node() { next.fill(-1); }
    std::array<std::int32_t, 256> next;
    std::int32_t fail = 0;
    std::int32_t depth = 0;
    std::vector<std::size_t> out;
  };
  std::vector<Node> nodes_;
};

std::string_view name_of(PatternKind kind) {
  switch (kind) {
    case PatternKind::LiteralPhrase: return "literal_phrase";
    case PatternKind::BoundedToken: return "bounded_token";
    case PatternKind::SuffixWildcard: return "suffix_wildcard";
  }
  return "?";
}

PatternSpec parse_term(std::string_view raw, Aspect topic, bool case_sensitive, std::optional<std::string> variant_of) {
  PatternSpec spec;
  spec.raw = std::string(trim(raw));
  spec.topic = topic;
  spec.case_sensitive = case_sensitive;
  spec.variant_of = std::move(variant_of);
  std::string_view rest = spec.raw;
  if (rest.empty()) throw DataError("empty term in topic " + std::string(name_of(topic)));

  bool bounded = spec.raw.find("\\b") != std::string::npos;
  if (rest.substr(0, 2) == "\\b") rest.remove_prefix(2);
  if (rest.size() >= 2 && rest.substr(rest.size() - 2) == "\\b") rest.remove_suffix(2);
  if (rest.size() >= 6 && rest.substr(rest.size() - 6) == "[a-z]*") {
    spec.letter_suffix = true;
    rest.remove_suffix(6);
  } else if (!rest.empty() && rest.back() == '*') {
    spec.letter_suffix = true;
    rest.remove_suffix(1);
  }
  rest = trim(rest);
  if (rest.empty()) throw DataError("empty term after removing pattern syntax: '" + spec.raw + "'");
  if (rest.find_first_of("\\[]*") != std::string_view::npos)
    throw DataError("unparseable character class in term '" + spec.raw + "'");

  for (std::size_t i = 0; i < rest.size();) {
    if (is_space(rest[i])) {
      while (i < rest.size() && is_space(rest[i])) ++i;
      spec.body.push_back(' ');
    } else {
      spec.body.push_back(case_sensitive ? rest[i] : fold(rest[i]));
      ++i;
    }
  }
  spec.kind = bounded ? PatternKind::BoundedToken
                      : (spec.letter_suffix ? PatternKind::SuffixWildcard : PatternKind::LiteralPhrase);
  spec.normalized = (case_sensitive ? "=" : "") + spec.body + (spec.letter_suffix ? "*" : "");
  return spec;
}

Lexicon::Lexicon(std::vector<PatternSpec> specs) {
  std::set<std::pair<std::string, std::size_t>> seen;
  for (auto& s : specs) {
    if (!seen.insert({s.normalized, index_of(s.topic)}).second) {
      ++dropped_duplicates_;
      continue;
    }
    specs_.push_back(std::move(s));
  }
  std::string canonical;
  std::vector<std::string> folded_patterns;
  std::vector<std::string> exact_patterns;
  for (std::size_t id = 0; id < specs_.size(); ++id) {
    const auto& s = specs_[id];
    topic_index_[index_of(s.topic)].push_back(id);
    canonical += std::string(abma::name_of(s.topic)) + '\t' + s.normalized + '\t' + std::string(name_of(s.kind)) + '\t' +
                 s.raw + '\t' + s.variant_of.value_or("") + '\n';
    if (s.case_sensitive) {
      exact_patterns.push_back(s.body);
      exact_ids_.push_back(id);
    } else {
      folded_patterns.push_back(s.body);
      folded_ids_.push_back(id);
    }
  }
  version_hash_ = io::sha256_hex(canonical);
  folded_ = std::make_unique<AhoCorasick>(folded_patterns);
  exact_ = std::make_unique<AhoCorasick>(exact_patterns);
}

Lexicon::~Lexicon() = default;
Lexicon::Lexicon(Lexicon&&) noexcept = default;
Lexicon& Lexicon::operator=(Lexicon&&) noexcept = default;

std::vector<std::pair<std::size_t, Span>> Lexicon::match_text(std::string_view text) const {
  std::vector<std::pair<std::size_t, Span>> found;
  if (text.empty()) return found;
  Stream stream = collapse(text);

  auto accept = [&](std::size_t spec_id, std::size_t collapsed_end) {
    const auto& spec = specs_[spec_id];
    std::size_t collapsed_start = collapsed_end - spec.body.size();
    std::size_t start = stream.begin[collapsed_start];
    std::size_t end = stream.end[collapsed_end - 1];
    if (start > 0 && is_word(text[start - 1]) && is_word(text[start])) return;
    if (spec.letter_suffix) {
      while (end < text.size() &&
             ((text[end] >= 'a' && text[end] <= 'z') || (!spec.case_sensitive && text[end] >= 'A' && text[end] <= 'Z')))
        ++end;
    }
    if (end < text.size() && is_word(text[end - 1]) && is_word(text[end])) return;
    found.push_back({spec_id, Span{start, end}});
  };
  folded_->scan(stream.folded, [&](std::size_t p, std::size_t end) { accept(folded_ids_[p], end); });
  exact_->scan(stream.exact, [&](std::size_t p, std::size_t end) { accept(exact_ids_[p], end); });
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return std::pair(a.second.start, a.first) < std::pair(b.second.start, b.first);
  });
  return found;
}

Lexicon compile_lexicon(std::string_view source, CompileOptions options) {
  auto rows = io::parse_csv(source);
  if (rows.empty()) throw DataError("lexicon source is empty");
  std::optional<std::size_t> topic_col, term_col, cs_col, variant_col;
  for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
    auto name = trim(rows[0].fields[i]);
    if (name == "topic") topic_col = i;
    else if (name == "term") term_col = i;
    else if (name == "case_sensitive") cs_col = i;
    else if (name == "variant_of") variant_col = i;
  }
  if (!topic_col || !term_col) throw DataError("lexicon header must contain 'topic' and 'term'");

  auto field = [](const io::CsvRow& row, std::optional<std::size_t> col) -> std::string_view {
    if (!col || *col >= row.fields.size()) return {};
    return trim(row.fields[*col]);
  };
  std::vector<PatternSpec> specs;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto where = "lexicon line " + std::to_string(row.line) + ": ";
    auto topic = parse_aspect(field(row, topic_col));
    if (!topic) throw DataError(where + "unknown topic '" + std::string(field(row, topic_col)) + "'");
    auto cs_text = field(row, cs_col);
    bool cs = false;
    if (cs_text == "true" || cs_text == "1") cs = true;
    else if (!cs_text.empty() && cs_text != "false" && cs_text != "0")
      throw DataError(where + "case_sensitive must be true/false, got '" + std::string(cs_text) + "'");
    std::optional<std::string> variant;
    if (auto v = field(row, variant_col); !v.empty()) variant = std::string(v);
    try {
      specs.push_back(parse_term(row.fields[*term_col], *topic, cs, std::move(variant)));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  Lexicon lex(std::move(specs));
  if (options.require_all_topics) {
    for (std::size_t t = 0; t < kAspectCount; ++t)
      if (lex.topic_specs(aspect_at(t)).empty())
        throw DataError("lexicon has no terms for topic " + std::string(kAspectNames[t]));
  }
  return lex;
}

Lexicon compile_lexicon_file(const std::filesystem::path& path, CompileOptions options) {
  return compile_lexicon(io::read_file(path), options);
}

std::vector<Hit> match_sentence(const Lexicon& lexicon, const corpus::Sentence& sentence) {
  std::vector<Hit> hits;
  for (const auto& [id, span] : lexicon.match_text(sentence.text))
    hits.push_back({sentence.transcript_id, sentence.index, id, lexicon.specs()[id].topic, span});
  return hits;
}

FilterResult filter_corpus(const Lexicon& lexicon, const std::vector<corpus::Sentence>& sentences) {
  FilterResult out;
  out.sentence_count = sentences.size();
  for (const auto& s : sentences) {
    auto hits = match_sentence(lexicon, s);
    if (hits.empty()) continue;
    ++out.matched_sentences;
    out.hits.insert(out.hits.end(), std::make_move_iterator(hits.begin()), std::make_move_iterator(hits.end()));
  }
  out.density = out.sentence_count == 0
                    ? 0.0
                    : static_cast<double>(out.matched_sentences) / static_cast<double>(out.sentence_count);
  return out;
}

io::json to_json(const Hit& hit, const Lexicon& lexicon) {
  return {{"transcript_id", hit.transcript_id},
          {"sentence_index", hit.sentence_index},
          {"topic", std::string(abma::name_of(hit.topic))},
          {"term", lexicon.specs().at(hit.spec_id).raw},
          {"start", hit.span.start},
          {"end", hit.span.end}};
}

Hit hit_from_json(const io::json& j, const Lexicon& lexicon) {
  try {
    Hit h;
    h.transcript_id = j.at("transcript_id").get<std::string>();
    h.sentence_index = j.at("sentence_index").get<std::size_t>();
    auto topic = parse_aspect(j.at("topic").get<std::string>());
    if (!topic) throw DataError("unknown topic in hit record: " + j.at("topic").get<std::string>());
    h.topic = *topic;
    auto term = j.at("term").get<std::string>();
    const auto& ids = lexicon.topic_specs(*topic);
    auto it = std::find_if(ids.begin(), ids.end(), [&](std::size_t id) { return lexicon.specs()[id].raw == term; });
    if (it == ids.end()) throw DataError("hit term not in lexicon: " + term);
    h.spec_id = *it;
    h.span = {j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
    return h;
  } catch (const nlohmann::ordered_json::exception& e) {
    throw DataError(std::string("malformed hit record: ") + e.what());
  }
}

}  // namespace abma::lexicon

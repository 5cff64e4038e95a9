#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abma/io.hpp"

#include "abma/corpus.hpp"
#include "abma/labels.hpp"

namespace abma::lexicon {

enum class PatternKind { LiteralPhrase, BoundedToken, SuffixWildcard };

std::string_view name_of(PatternKind kind);

/// One keyword term of the lexicon, parsed from its source dialect.
///
/// Dialect: a `\b` anywhere makes the term a bounded token; a trailing
/// `[a-z]*` or bare `*` makes it a suffix wildcard (zero or more ASCII
/// letters). Every term is matched with token boundaries on both ends, and
/// any internal whitespace matches a run of whitespace.
struct PatternSpec {
  std::string raw;
  PatternKind kind = PatternKind::LiteralPhrase;
  std::string normalized;
  Aspect topic = Aspect::DigitalProduct;
  bool case_sensitive = false;
  std::optional<std::string> variant_of;

  /// Text matched literally, internal whitespace collapsed to one space,
  /// lowercased unless case sensitive.
  std::string body;
  bool letter_suffix = false;
};

/// Parses a single term. Throws DataError for empty terms or unsupported
/// regex syntax.
PatternSpec parse_term(std::string_view raw, Aspect topic, bool case_sensitive = false,
                       std::optional<std::string> variant_of = std::nullopt);

/// A [start, end) byte range inside a sentence.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct Hit {
  std::string transcript_id;
  std::size_t sentence_index = 0;
  std::size_t spec_id = 0;
  Aspect topic = Aspect::DigitalProduct;
  Span span;
  friend bool operator==(const Hit&, const Hit&) = default;
};

class AhoCorasick;

/// Compiled, immutable multi-pattern matcher.
class Lexicon {
 public:
  /// Deduplicates specs on (normalized, topic), keeping the first.
  explicit Lexicon(std::vector<PatternSpec> specs);
  ~Lexicon();
  Lexicon(Lexicon&&) noexcept;
  Lexicon& operator=(Lexicon&&) noexcept;

  const std::vector<PatternSpec>& specs() const { return specs_; }
  const std::vector<std::size_t>& topic_specs(Aspect topic) const { return topic_index_[index_of(topic)]; }
  const std::string& version_hash() const { return version_hash_; }
  std::size_t dropped_duplicates() const { return dropped_duplicates_; }

  /// All matches in `text`, ordered by (start, spec id).
  std::vector<std::pair<std::size_t, Span>> match_text(std::string_view text) const;

 private:
  std::vector<PatternSpec> specs_;
  std::array<std::vector<std::size_t>, kAspectCount> topic_index_;
  std::string version_hash_;
  std::size_t dropped_duplicates_ = 0;
  std::unique_ptr<AhoCorasick> folded_;
  std::unique_ptr<AhoCorasick> exact_;
  std::vector<std::size_t> folded_ids_;
  std::vector<std::size_t> exact_ids_;
};

struct CompileOptions {
  bool require_all_topics = true;
};

/// Source is CSV with header `topic,term[,case_sensitive][,variant_of]`.
Lexicon compile_lexicon(std::string_view source, CompileOptions options = {});
Lexicon compile_lexicon_file(const std::filesystem::path& path, CompileOptions options = {});

std::vector<Hit> match_sentence(const Lexicon& lexicon, const corpus::Sentence& sentence);

struct FilterResult {
  std::vector<Hit> hits;
  std::size_t sentence_count = 0;
  std::size_t matched_sentences = 0;
  double density = 0.0;
};

/// Hits come back in input sentence order, grouped by sentence.
FilterResult filter_corpus(const Lexicon& lexicon, const std::vector<corpus::Sentence>& sentences);

io::json to_json(const Hit& hit, const Lexicon& lexicon);
/// Resolves `term` back to a spec id of the given lexicon.
Hit hit_from_json(const io::json& j, const Lexicon& lexicon);

}  // namespace abma::lexicon

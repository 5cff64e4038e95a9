#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "abma/io.hpp"

#include "abma/corpus.hpp"
#include "abma/labels.hpp"
#include "abma/lexicon.hpp"

namespace abma::docbuild {

/// A contiguous run of sentences from one transcript around keyword hits.
struct Document {
  std::string doc_id;
  std::string transcript_id;
  std::string company;
  std::string call_date;  // ISO-8601
  std::vector<std::size_t> sentence_indices;
  std::string text;
  /// Metadata only; never part of classifier input.
  std::set<Aspect> hit_topics;
};

struct TranscriptInfo {
  std::string ticker;
  std::string call_date;
  /// Sentence texts in index order.
  std::vector<std::string> sentences;
};

using TranscriptTable = std::map<std::string, TranscriptInfo>;

/// Groups sentences under the given transcript metadata; sentences must
/// arrive with contiguous indices per transcript.
TranscriptTable make_table(const std::vector<corpus::Transcript>& transcripts,
                           const std::vector<corpus::Sentence>& sentences);

/// 16 hex chars of SHA-256 over the transcript id and member indices.
std::string document_id(const std::string& transcript_id, const std::vector<std::size_t>& indices);

/// Expands every hit sentence by `window` neighbours on each side (clipped at
/// the transcript edges) and merges windows that overlap or touch; with a zero
/// window every hit sentence is its own document. Output is
/// ordered by (transcript id, first index).
std::vector<Document> build_documents(const TranscriptTable& table, const std::vector<lexicon::Hit>& hits,
                                      std::size_t window = 1);

io::json to_json(const Document& doc);
Document document_from_json(const io::json& j);

}  // namespace abma::docbuild

#include "abma/docbuild.hpp"

#include <algorithm>

#include "abma/error.hpp"
#include "abma/io.hpp"

namespace abma::docbuild {

TranscriptTable make_table(const std::vector<corpus::Transcript>& transcripts,
                           const std::vector<corpus::Sentence>& sentences) {
  TranscriptTable table;
  for (const auto& t : transcripts) table[t.id()] = {t.ticker, corpus::format_date(t.call_date), {}};
  for (const auto& s : sentences) {
    auto it = table.find(s.transcript_id);
    if (it == table.end()) throw DataError("sentence references unknown transcript " + s.transcript_id);
    if (s.index != it->second.sentences.size())
      throw DataError("sentence indices are not contiguous in transcript " + s.transcript_id);
    it->second.sentences.push_back(s.text);
  }
  return table;
}

std::string document_id(const std::string& transcript_id, const std::vector<std::size_t>& indices) {
  std::string key = transcript_id + ':';
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) key.push_back(',');
    key += std::to_string(indices[i]);
  }
  return io::sha256_hex(key).substr(0, 16);
}

std::vector<Document> build_documents(const TranscriptTable& table, const std::vector<lexicon::Hit>& hits,
                                      std::size_t window) {
  // transcript id -> hit sentence index -> topics
  std::map<std::string, std::map<std::size_t, std::set<Aspect>>> by_transcript;
  for (const auto& h : hits) {
    auto it = table.find(h.transcript_id);
    if (it == table.end() || h.sentence_index >= it->second.sentences.size())
      throw DataError("hit references missing sentence " + h.transcript_id + "#" + std::to_string(h.sentence_index));
    by_transcript[h.transcript_id][h.sentence_index].insert(h.topic);
  }

  std::vector<Document> docs;
  for (const auto& [tid, hit_rows] : by_transcript) {
    const auto& info = table.at(tid);
    const std::size_t last = info.sentences.size() - 1;
    std::size_t lo = 0;
    std::size_t hi = 0;
    std::set<Aspect> topics;
    bool open = false;
    auto flush = [&] {
      Document d;
      d.transcript_id = tid;
      d.company = info.ticker;
      d.call_date = info.call_date;
      for (std::size_t i = lo; i <= hi; ++i) {
        d.sentence_indices.push_back(i);
        if (i > lo) d.text.push_back(' ');
        d.text += info.sentences[i];
      }
      d.hit_topics = topics;
      d.doc_id = document_id(tid, d.sentence_indices);
      docs.push_back(std::move(d));
    };
    for (const auto& [idx, t] : hit_rows) {
      std::size_t a = idx > window ? idx - window : 0;
      std::size_t b = std::min(last, idx + window);
      // with no context, adjacent hit sentences stay separate documents
      if (open && (window > 0 ? a <= hi + 1 : a <= hi)) {
        hi = std::max(hi, b);
      } else {
        if (open) flush();
        lo = a;
        hi = b;
        topics.clear();
        open = true;
      }
      topics.insert(t.begin(), t.end());
    }
    if (open) flush();
  }
  return docs;
}

io::json to_json(const Document& doc) {
  io::json topics = io::json::array();
  for (auto a : doc.hit_topics) topics.push_back(std::string(name_of(a)));
  return {{"doc_id", doc.doc_id},
          {"company", doc.company},
          {"call_date", doc.call_date},
          {"sentence_indices", doc.sentence_indices},
          {"text", doc.text},
          {"hit_topics", topics}};
}

Document document_from_json(const io::json& j) {
  try {
    Document d;
    d.doc_id = j.at("doc_id").get<std::string>();
    d.company = j.at("company").get<std::string>();
    d.call_date = j.at("call_date").get<std::string>();
    d.transcript_id = d.company + "@" + d.call_date;
    d.sentence_indices = j.at("sentence_indices").get<std::vector<std::size_t>>();
    d.text = j.at("text").get<std::string>();
    for (const auto& t : j.at("hit_topics")) {
      auto a = parse_aspect(t.get<std::string>());
      if (!a) throw DataError("unknown topic in document " + d.doc_id + ": " + t.get<std::string>());
      d.hit_topics.insert(*a);
    }
    return d;
  } catch (const nlohmann::ordered_json::exception& e) {
    throw DataError(std::string("malformed document record: ") + e.what());
  }
}

}  // namespace abma::docbuild

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "abma/error.hpp"
#include "abma/lexicon.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace abma;
using namespace abma::lexicon;

namespace {

const Lexicon& shipped() {
  static Lexicon lex = compile_lexicon_file(ABMA_LEXICON);
  return lex;
}

std::set<oracle::Match> compiled_matches(const Lexicon& lex, std::string_view text) {
  std::set<oracle::Match> out;
  for (const auto& [id, span] : lex.match_text(text)) {
    const auto& s = lex.specs()[id];
    auto key = oracle::make_term(std::string(name_of(s.topic)), s.raw, s.case_sensitive).key();
    out.insert({key, span.start, span.end});
  }
  return out;
}

std::vector<std::string> topics_in(const Lexicon& lex, std::string_view text) {
  std::vector<std::string> out;
  for (const auto& [id, span] : lex.match_text(text)) out.emplace_back(name_of(lex.specs()[id].topic));
  return out;
}

Lexicon small(std::string rows) { return compile_lexicon("topic,term,case_sensitive\n" + rows, {false}); }

}  // namespace

TEST_CASE("term kinds") {
  CHECK(parse_term("\\bAI\\b", Aspect::Ai).kind == PatternKind::BoundedToken);
  CHECK(parse_term("3D print[a-z]*", Aspect::Printing3d).kind == PatternKind::SuffixWildcard);
  CHECK(parse_term("smart product*", Aspect::DigitalProduct).kind == PatternKind::SuffixWildcard);
  CHECK(parse_term("machine learning", Aspect::Ai).kind == PatternKind::LiteralPhrase);
  CHECK(parse_term("Machine   Learning", Aspect::Ai).body == "machine learning");
  CHECK(parse_term("\\bAI\\b", Aspect::Ai, true).normalized != parse_term("\\bAI\\b", Aspect::Ai).normalized);
  CHECK_THROWS_AS(parse_term("  ", Aspect::Ai), DataError);
  CHECK_THROWS_WITH_AS(parse_term("data[0-9]+", Aspect::Analytics), doctest::Contains("'data[0-9]+'"), DataError);
}

TEST_CASE("compile errors") {
  CHECK_THROWS_WITH_AS(compile_lexicon("topic,term\nmetaverse,avatar\n"), doctest::Contains("metaverse"), DataError);
  CHECK_THROWS_AS(compile_lexicon("topic,term\nai,\n", {false}), DataError);
  CHECK_THROWS_WITH_AS(compile_lexicon("topic,term\nai,machine learning\n"), doctest::Contains("no terms for topic"),
                       DataError);
  CHECK_THROWS_AS(compile_lexicon("topic,term,case_sensitive\nai,x,maybe\n", {false}), DataError);
}

TEST_CASE("shipped lexicon") {
  const auto& lex = shipped();
  for (std::size_t t = 0; t < kAspectCount; ++t) CHECK_FALSE(lex.topic_specs(aspect_at(t)).empty());
  // the same raw term may live under two topics
  int immersive = 0;
  for (const auto& s : lex.specs()) immersive += s.raw == "immersive technologies";
  CHECK(immersive == 2);
  CHECK(lex.dropped_duplicates() > 0);
  CHECK(lex.version_hash().size() == 64);
  CHECK(compile_lexicon_file(ABMA_LEXICON).version_hash() == lex.version_hash());
}

TEST_CASE("bounded tokens and case") {
  const auto& lex = shipped();
  auto hits = lex.match_text("Our AI platform scaled.");
  std::vector<std::string> ai;
  for (const auto& [id, span] : hits)
    if (lex.specs()[id].topic == Aspect::Ai) ai.push_back(std::string("Our AI platform scaled.").substr(span.start, span.end - span.start));
  CHECK(ai == std::vector<std::string>{"AI"});
  CHECK(topics_in(lex, "We retail globally.").empty());
  CHECK(topics_in(lex, "our ai effort").empty());
  CHECK(topics_in(lex, "IoT and IOT").size() == 2);
}

TEST_CASE("suffix wildcards") {
  auto lex = small("printing_3d,3D print[a-z]*,false\ndigital_product,smart product*,false\n");
  auto span_text = [&](std::string_view text) {
    std::vector<std::string> out;
    for (const auto& [id, span] : lex.match_text(text)) out.emplace_back(text.substr(span.start, span.end - span.start));
    return out;
  };
  CHECK(span_text("3D printing, 3D printed and 3D print.") ==
        std::vector<std::string>{"3D printing", "3D printed", "3D print"});
  CHECK(span_text("smart product and smart products") == std::vector<std::string>{"smart product", "smart products"});
  // letters-only suffix: productivity is accepted, the hyphen ends the run
  CHECK(span_text("smart productivity") == std::vector<std::string>{"smart productivity"});
  CHECK(span_text("smart productivity-suite") == std::vector<std::string>{"smart productivity"});
  CHECK(span_text("smart product2").empty());
  CHECK(span_text("3d PRINTING") == std::vector<std::string>{"3d PRINTING"});
}

TEST_CASE("implicit boundaries and whitespace runs") {
  auto lex = small("cloud,cloud,false\ncloud,cloud computing,false\n");
  CHECK(lex.match_text("clouded skies").empty());
  CHECK(lex.match_text("Cloud\n\t  Computing").size() == 2);
  CHECK(lex.match_text("(cloud)").size() == 1);
}

TEST_CASE("multi-topic sentence") {
  auto topics = topics_in(shipped(), "We use machine learning and cloud computing.");
  CHECK(std::count(topics.begin(), topics.end(), "ai") >= 1);
  CHECK(std::count(topics.begin(), topics.end(), "cloud") >= 1);
}

TEST_CASE("filter density counts sentences, not hits") {
  std::vector<corpus::Sentence> ss;
  for (std::size_t i = 0; i < 100; ++i) ss.push_back({"T@2018-01-01", i, "Revenue was flat."});
  auto r = filter_corpus(shipped(), ss);
  CHECK(r.density == 0.0);
  ss[5].text = "Machine learning, blockchain and drones.";
  r = filter_corpus(shipped(), ss);
  CHECK(r.hits.size() == 3);
  CHECK(r.matched_sentences == 1);
  CHECK(r.density == 0.01);
  CHECK(filter_corpus(shipped(), {}).density == 0.0);
}

TEST_CASE("naive oracle equivalence on adversarial sentences") {
  const auto terms = oracle::read_terms(io::read_file(ABMA_LEXICON));
  abma::Rng rng(7);
  auto sentences = gen::lexicon_sentences(rng, terms, 1500);
  std::size_t total = 0;
  for (const auto& s : sentences) {
    auto expected = oracle::scan(terms, s);
    total += expected.size();
    REQUIRE(compiled_matches(shipped(), s) == expected);
  }
  CHECK(total > 500);
}

TEST_CASE("adding a spec never removes a hit") {
  auto base = io::read_file(ABMA_LEXICON);
  auto more = compile_lexicon(base + "ai,revenue,false\nai,\\bwe\\b,true\n");
  abma::Rng rng(3);
  auto sentences = gen::lexicon_sentences(rng, oracle::read_terms(base), 300);
  for (const auto& s : sentences) {
    auto a = compiled_matches(shipped(), s);
    auto b = compiled_matches(more, s);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("hit json round trip") {
  corpus::Sentence s{"T@2018-01-01", 4, "We launched a mobile app."};
  auto hits = match_sentence(shipped(), s);
  REQUIRE_FALSE(hits.empty());
  for (const auto& h : hits) {
    auto j = to_json(h, shipped());
    CHECK(hit_from_json(j, shipped()) == h);
    CHECK(j["start"].get<std::size_t>() == h.span.start);
  }
}

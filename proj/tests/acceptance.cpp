// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "abma/aggregate.hpp"
#include "abma/classify.hpp"
#include "abma/clusterkit.hpp"
#include "abma/docbuild.hpp"
#include "abma/error.hpp"
#include "abma/lexicon.hpp"
#include "abma/pipeline.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace abma;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Each criterion appends failures to `why`; an empty list means pass.
struct Outcome {
  std::vector<std::string> why;
  std::string detail;
  void expect(bool ok, const std::string& what) {
    if (!ok) why.push_back(what);
  }
};

int failures = 0;

void criterion(int number, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome out;
  try {
    body(out);
  } catch (const std::exception& e) {
    out.why.push_back(std::string("exception: ") + e.what());
  }
  bool ok = out.why.empty();
  failures += !ok;
  std::cout << (ok ? "PASS" : "FAIL") << " [" << number << "] " << name;
  if (!out.detail.empty()) std::cout << " (" << out.detail << ")";
  std::cout << "\n";
  for (std::size_t i = 0; i < out.why.size() && i < 5; ++i) std::cout << "    " << out.why[i] << "\n";
  std::cout.flush();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

classify::Prediction pred(std::string id, const std::vector<Aspect>& aspects, Maturity m) {
  classify::Prediction p;
  p.doc_id = std::move(id);
  for (auto a : aspects) p.aspects.emplace_back(a, 0.9);
  p.maturity_scores[index_of(m)] = 1.0;
  return p;
}

clusterkit::Matrix uniform_points(Rng& rng, int n, int d) {
  clusterkit::Matrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.uniform() * 10;
  return x;
}

void lexicon_equivalence(Outcome& out) {
  const auto text = io::read_file(ABMA_LEXICON);
  const auto terms = oracle::read_terms(text);
  Rng rng(2024);
  auto sentences = gen::lexicon_sentences(rng, terms, 10000);

  auto t0 = Clock::now();
  auto lex = lexicon::compile_lexicon(text);
  std::vector<std::set<oracle::Match>> got(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i)
    for (const auto& [id, span] : lex.match_text(sentences[i])) {
      const auto& s = lex.specs()[id];
      got[i].insert({oracle::make_term(std::string(name_of(s.topic)), s.raw, s.case_sensitive).key(), span.start, span.end});
    }
  double elapsed = seconds_since(t0);

  std::size_t discrepancies = 0, hits = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto want = oracle::scan(terms, sentences[i]);
    hits += want.size();
    if (want != got[i]) {
      ++discrepancies;
      if (discrepancies <= 3) out.why.push_back("mismatch on: " + sentences[i]);
    }
  }
  out.expect(discrepancies == 0, std::to_string(discrepancies) + " discrepant sentences");
  out.expect(hits > 3000, "synthetic corpus produced too few hits");
  out.expect(elapsed < 10.0, "compiled matcher took " + fmt("%.2f s", elapsed));
  out.detail = "10000 sentences, " + std::to_string(hits) + " hits, " + std::to_string(discrepancies) + " discrepancies, " + fmt("%.3f s", elapsed);
}

void filter_density(Outcome& out) {
  std::vector<corpus::Sentence> sentences;
  for (const auto& line : io::parse_jsonl(io::read_file(ABMA_FIXTURES "/density_sentences.jsonl")))
    sentences.push_back(corpus::sentence_from_json(line.value));
  auto r = lexicon::filter_corpus(lexicon::compile_lexicon_file(ABMA_LEXICON), sentences);
  out.expect(sentences.size() == 1000, "fixture does not hold 1000 sentences");
  out.expect(r.matched_sentences == 15, "matched " + std::to_string(r.matched_sentences) + " sentences");
  out.expect(r.density == 0.015, "density " + io::format_double(r.density));
  out.detail = "density " + fmt("%.5f", r.density);
}

void window_merging(Outcome& out) {
  Rng rng(31);
  int zero_window = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const std::size_t w = trial % 4 == 0 ? 0 : rng.below(4);
    zero_window += w == 0;
    docbuild::TranscriptTable table;
    auto& info = table["T@2018-01-01"];
    info.ticker = "T";
    info.call_date = "2018-01-01";
    for (std::size_t i = 0; i < n; ++i) info.sentences.push_back("s" + std::to_string(i));
    std::vector<lexicon::Hit> hits;
    std::vector<std::size_t> idx;
    for (std::uint64_t k = rng.below(10); k > 0; --k) {
      lexicon::Hit h;
      h.transcript_id = "T@2018-01-01";
      h.sentence_index = rng.below(n);
      h.topic = aspect_at(rng.below(kAspectCount));
      idx.push_back(h.sentence_index);
      hits.push_back(h);
    }
    auto docs = docbuild::build_documents(table, hits, w);
    std::vector<int> cover(n, 0);
    for (const auto& d : docs) {
      for (std::size_t j = 0; j < d.sentence_indices.size(); ++j) {
        ++cover[d.sentence_indices[j]];
        if (j && d.sentence_indices[j] != d.sentence_indices[j - 1] + 1) out.why.push_back("non-contiguous document");
      }
    }
    for (std::size_t i : idx) out.expect(cover[i] == 1, "hit index not covered exactly once");
    for (int c : cover) out.expect(c <= 1, "sentence shared by two documents");
    if (w == 0) {
      std::set<std::size_t> distinct(idx.begin(), idx.end());
      out.expect(docs.size() == distinct.size(), "window 0 did not give one document per hit sentence");
      for (const auto& d : docs) out.expect(d.sentence_indices.size() == 1, "window 0 produced a non-singleton");
    }
    std::vector<std::vector<std::size_t>> runs;
    for (const auto& d : docs) runs.push_back(d.sentence_indices);
    out.expect(runs == oracle::windows(n, idx, w), "differs from interval oracle");
    if (out.why.size() > 5) return;
  }
  out.detail = "1000 patterns, " + std::to_string(zero_window) + " with window 0";
}

void metric_identities(Outcome& out) {
  Rng rng(404);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<classify::LabeledExample> gold;
    std::vector<classify::Prediction> preds;
    const std::size_t n = 1 + rng.below(100);
    for (std::size_t i = 0; i < n; ++i) {
      classify::LabeledExample g{std::to_string(i), "", {}, std::nullopt};
      if (rng.uniform() > 0.15) {
        for (std::size_t a = 0; a < kAspectCount; ++a)
          if (rng.uniform() < 0.12) g.aspects.insert(aspect_at(a));
        if (g.aspects.empty()) g.aspects.insert(aspect_at(rng.below(kAspectCount)));
        g.maturity = maturity_at(rng.below(kMaturityCount));
      }
      gold.push_back(g);
      if (rng.uniform() < 0.05) continue;
      std::vector<Aspect> guess;
      for (std::size_t a = 0; a < kAspectCount; ++a)
        if (rng.uniform() < 0.12 || (g.aspects.count(aspect_at(a)) && rng.uniform() < 0.6)) guess.push_back(aspect_at(a));
      preds.push_back(pred(g.doc_id, guess, maturity_at(rng.below(kMaturityCount))));
    }
    auto got = classify::evaluate(preds, gold);
    auto want = oracle::weighted_metrics(preds, gold);
    for (double d : {got.aspect.precision - want.aspect.p, got.aspect.recall - want.aspect.r, got.aspect.f1 - want.aspect.f,
                     got.maturity.precision - want.maturity.p, got.maturity.recall - want.maturity.r,
                     got.maturity.f1 - want.maturity.f})
      worst = std::max(worst, std::abs(d));
  }
  out.expect(worst <= 1e-12, "max deviation " + io::format_double(worst));

  std::vector<classify::LabeledExample> gold = {{"1", "", {Aspect::Ai}, Maturity::Plan},
                                                {"2", "", {Aspect::Cloud}, Maturity::Plan}};
  auto toy = classify::evaluate({pred("1", {Aspect::Ai}, Maturity::Plan), pred("2", {Aspect::Ai}, Maturity::Plan)}, gold);
  out.expect(std::abs(toy.aspect.f1 - 1.0 / 3.0) <= 1e-9, "toy weighted F1 " + io::format_double(toy.aspect.f1));
  out.detail = "200 instances, max deviation " + fmt("%.1e", worst) + ", toy F1 " + fmt("%.9f", toy.aspect.f1);
}

void baseline_learnability(Outcome& out) {
  auto data = classify::load_labeled(ABMA_FIXTURES "/separable.jsonl");
  out.expect(data.size() == 200, "separable set does not hold 200 records");
  auto run = [&] {
    auto split = classify::split_dataset(data, 42);
    auto model = classify::train_baseline(split.train);
    auto preds = classify::predict(model, classify::items_of(split.test));
    return std::make_pair(classify::evaluate(preds, split.test), classify::export_predictions(preds) + model.to_json().dump());
  };
  auto [first, bytes1] = run();
  auto [second, bytes2] = run();
  out.expect(first.aspect.f1 >= 0.95, "aspect F1 " + io::format_double(first.aspect.f1));
  out.expect(first.maturity.f1 >= 0.90, "maturity F1 " + io::format_double(first.maturity.f1));
  out.expect(bytes1 == bytes2, "two seeded runs differ");
  out.detail = "aspect F1 " + fmt("%.4f", first.aspect.f1) + ", maturity F1 " + fmt("%.4f", first.maturity.f1);
}

void checklist_aggregation(Outcome& out) {
  using aggregate::AspectOccurrence;
  auto occ = [](std::string c, int y, Aspect a, int level) {
    return AspectOccurrence{std::move(c), y, a, maturity_at(std::size_t(level - 1))};
  };
  Rng rng(77);
  const std::vector<std::string> companies = {"A", "B", "C", "D"};
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<AspectOccurrence> o;
    for (std::uint64_t n = rng.below(51); n > 0; --n)
      o.push_back(occ(companies[rng.below(4)], 2014 + int(rng.below(7)), aspect_at(rng.below(kAspectCount)),
                      1 + int(rng.below(4))));
    auto m = aggregate::company_matrix(o);
    for (std::size_t r = 0; r < m.companies.size(); ++r) {
      double total = 0;
      for (std::size_t a = 0; a < kAspectCount; ++a) {
        std::vector<std::pair<int, int>> yl;
        for (const auto& x : o)
          if (x.company == m.companies[r] && index_of(x.aspect) == a) yl.emplace_back(x.year, value_of(x.maturity));
        double want = oracle::checklist(yl, 2015, 2019);
        total += want;
        mismatches += m.rows[r][a] != want;
        out.expect(m.rows[r][a] >= 0 && m.rows[r][a] <= 10, "score out of [0,10]");
      }
      mismatches += std::abs(m.rows[r][kAspectCount] - total / 17) > 1e-12;
    }
  }
  out.expect(mismatches == 0, std::to_string(mismatches) + " cells differ from the oracle");

  std::vector<AspectOccurrence> worked;
  for (int l : {1, 4}) worked.push_back(occ("X", 2015, Aspect::Cloud, l));
  worked.push_back(occ("X", 2016, Aspect::Cloud, 3));
  for (int l : {1, 2, 3, 4}) worked.push_back(occ("X", 2018, Aspect::Cloud, l));
  for (int l : {1, 3, 3}) worked.push_back(occ("X", 2019, Aspect::Cloud, l));
  double worked_score = aggregate::company_matrix(worked).rows.at(0)[index_of(Aspect::Cloud)];
  out.expect(worked_score == 4.4, "worked example gives " + io::format_double(worked_score));

  std::vector<AspectOccurrence> full;
  for (int y = 2015; y <= 2019; ++y)
    for (int l = 1; l <= 4; ++l) full.push_back(occ("X", y, Aspect::Ai, l));
  double max_score = aggregate::company_matrix(full).rows.at(0)[index_of(Aspect::Ai)];
  out.expect(max_score == 10.0, "all classes every year gives " + io::format_double(max_score));
  out.detail = "500 instances, worked example " + io::format_double(worked_score) + ", maximum " +
               io::format_double(max_score);
}

void dense_selection(Outcome& out) {
  auto m = clusterkit::parse_feature_csv(io::read_file(ABMA_FIXTURES "/dense_matrix.csv"));
  auto sel = clusterkit::select_dense_features(m, 0.40);
  auto want = io::json::parse(io::read_file(ABMA_FIXTURES "/dense_matrix_expected.json"))["kept"];
  out.expect(m.values.cols() == 18, "fixture does not have 18 columns");
  out.expect(sel.kept.size() == 12, std::to_string(sel.kept.size()) + " columns kept");
  out.expect(sel.kept == want.get<std::vector<std::string>>(), "kept columns differ from the fixture construction");
  out.detail = std::to_string(m.values.cols()) + " -> " + std::to_string(sel.kept.size()) + " columns";
}

void tsne_numerics(Outcome& out) {
  using clusterkit::Matrix;
  Rng rng(8);
  double worst_rel = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto x = uniform_points(rng, 8, 4);
    auto p = clusterkit::joint_probabilities(x, 3.0);
    auto y = uniform_points(rng, 8, 2);
    auto analytic = clusterkit::kl_gradient(p, y);
    auto numeric = oracle::numeric_gradient([&](const Matrix& yy) { return clusterkit::kl_divergence(p, yy); }, y);
    worst_rel = std::max(worst_rel, (analytic - numeric).norm() / std::max(numeric.norm(), 1e-300));
  }
  out.expect(worst_rel <= 1e-4, "gradient relative error " + io::format_double(worst_rel));

  std::vector<double> perp;
  clusterkit::joint_probabilities(uniform_points(rng, 100, 5), 10.0, &perp);
  double worst_perp = 0;
  for (double v : perp) worst_perp = std::max(worst_perp, std::abs(v - 10.0));
  out.expect(worst_perp <= 1e-3, "perplexity off by " + io::format_double(worst_perp));

  // Three blobs of four points, centres 100 apart, unit spread. Perplexity
  // must stay below the three in-blob neighbours; the step size follows the
  // n-scaled rule because lr 200 overshoots on a dozen points.
  int separated = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng data_rng(seed);
    std::vector<int> labels;
    auto x = gen::blobs(data_rng, {{0, 0, 0}, {100, 0, 0}, {50, 86.6, 0}}, 4, 1.0, &labels);
    clusterkit::TsneConfig cfg;
    cfg.seed = seed;
    cfg.perplexity = 2.0;
    cfg.learning_rate = gen::small_sample_learning_rate(x.rows(), cfg.early_exaggeration);
    auto emb = clusterkit::tsne(x, cfg).embedding;
    separated += gen::blobs_separated(emb, labels);
  }
  Rng big_rng(300);
  auto big = gen::blobs(big_rng, {{0, 0, 0, 0, 0, 0}, {6, 0, 0, 0, 0, 0}, {0, 6, 0, 0, 0, 0}, {0, 0, 6, 0, 0, 0},
                                  {6, 6, 6, 0, 0, 0}},
                        60, 1.5);
  clusterkit::TsneConfig cfg;
  cfg.iterations = 1000;
  auto t0 = Clock::now();
  auto r = clusterkit::tsne(big, cfg);
  double elapsed = seconds_since(t0);
  out.expect(r.embedding.rows() == 300 && r.embedding.allFinite(), "300-point embedding malformed");
  out.expect(elapsed < 60.0, "300-point run took " + fmt("%.1f s", elapsed));
  out.detail = "grad rel err " + fmt("%.1e", worst_rel) + ", perplexity err " + fmt("%.1e", worst_perp) + ", " +
               std::to_string(separated) + "/10 separated, 300x1000 in " + fmt("%.2f s", elapsed);
}

void kmeans_silhouette(Outcome& out) {
  Rng rng(55);
  std::size_t increases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 3 + int(rng.below(60));
    int k = 1 + int(rng.below(std::uint64_t(std::min(n, 10))));
    auto x = uniform_points(rng, n, 1 + int(rng.below(4)));
    auto r = clusterkit::kmeans(x, k, rng.below(1u << 20));
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i) increases += r.inertia_history[i] > r.inertia_history[i - 1];
  }
  out.expect(increases == 0, std::to_string(increases) + " inertia increases");

  std::size_t inexact = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + int(rng.below(18));
    int k = 2 + int(rng.below(std::uint64_t(std::min(n - 1, 5))));
    auto x = uniform_points(rng, n, 1 + int(rng.below(3)));
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[std::size_t(i)] = i < k ? i : int(rng.below(std::uint64_t(k)));
    inexact += clusterkit::silhouette(x, labels) != oracle::silhouette(x, labels);
  }
  out.expect(inexact == 0, std::to_string(inexact) + " silhouettes differ from brute force");

  Rng blob_rng(4);
  auto x = gen::blobs(blob_rng, {{0, 0}, {10, 0}, {0, 10}, {10, 10}}, 20, 1.0);
  auto sweep = clusterkit::sweep_k(x, 2, 10, 42);
  out.expect(sweep.best_k == 4, "sweep peaks at k=" + std::to_string(sweep.best_k));
  out.detail = "100 fuzzed runs, 200 silhouettes exact, sweep best k=" + std::to_string(sweep.best_k);
}

void end_to_end(Outcome& out) {
  const fs::path config_path = ABMA_FIXTURES "/pipeline/config.toml";
  auto expected = io::json::parse(io::read_file(ABMA_FIXTURES "/pipeline/expected.json"));
  std::vector<fs::path> dirs = {fs::temp_directory_path() / "abma_acceptance_a", fs::temp_directory_path() / "abma_acceptance_b"};
  for (const auto& d : dirs) {
    fs::remove_all(d);
    auto config = pipeline::PipelineConfig::from_toml_file(config_path);
    config.out_dir = d;
    out.expect(config.seed == 42, "fixture config seed is not 42");
    pipeline::run_all(config);
  }
  std::size_t compared = 0;
  for (const auto& f : pipeline::deterministic_outputs()) {
    if (f.ends_with(".csv") || f.ends_with(".json") || f.ends_with(".jsonl") || f.ends_with(".txt")) ++compared;
    out.expect(io::read_file(dirs[0] / f) == io::read_file(dirs[1] / f), f + " differs between runs");
  }
  auto manifest = io::json::parse(io::read_file(dirs[0] / "manifest.json"));
  const auto& st = manifest["stages"];
  auto same = [&](const io::json& got, const char* key) {
    out.expect(got == expected[key], std::string(key) + ": got " + got.dump() + ", expected " + expected[key].dump());
  };
  same(st["ingest"]["counts"]["transcripts"], "transcripts");
  same(st["ingest"]["counts"]["companies"], "companies");
  same(st["ingest"]["counts"]["sentences"], "sentences");
  same(st["ingest"]["counts"]["rejected_rows"], "rejected_rows");
  same(st["filter"]["counts"]["hit_sentences"], "hit_sentences");
  same(st["filter"]["counts"]["hits"], "hits");
  same(st["build-docs"]["counts"]["documents"], "documents");
  same(st["train-baseline"]["counts"]["examples"], "labeled_examples");
  out.expect(pipeline::verify_manifest(dirs[0]).empty(), "manifest digests do not verify");
  out.detail = std::to_string(compared) + " outputs byte-identical, k=" + st["cluster"]["counts"]["k"].dump();
  for (const auto& d : dirs) fs::remove_all(d);
}

}  // namespace

int main() {
  criterion(1, "lexicon matcher equals naive scan", lexicon_equivalence);
  criterion(2, "filter density on the 15/1000 fixture", filter_density);
  criterion(3, "context-window merging properties", window_merging);
  criterion(4, "metric identities against the confusion oracle", metric_identities);
  criterion(5, "baseline learnability on the separable set", baseline_learnability);
  criterion(6, "checklist aggregation", checklist_aggregation);
  criterion(7, "dense-feature selection keeps 12 of 18", dense_selection);
  criterion(8, "t-SNE numerics", tsne_numerics);
  criterion(9, "k-means and silhouette", kmeans_silhouette);
  criterion(10, "end-to-end determinism", end_to_end);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}

#include "abma/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <functional>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "abma/corpus.hpp"
#include "abma/docbuild.hpp"
#include "abma/error.hpp"
#include "abma/lexicon.hpp"

namespace abma::pipeline {

namespace {

constexpr std::string_view kManifest = "manifest.json";

std::string now_iso() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// --- config -----------------------------------------------------------------

void check_keys(const toml::table& table, std::string_view section, std::initializer_list<std::string_view> known) {
  for (const auto& [key, node] : table) {
    if (std::find(known.begin(), known.end(), key.str()) == known.end())
      throw UsageError("unknown config key '" + std::string(section.empty() ? "" : std::string(section) + ".") +
                       std::string(key.str()) + "'");
  }
}

template <typename T>
void read(const toml::table& t, std::string_view key, T& target) {
  if (auto node = t.get(key)) {
    if constexpr (std::is_same_v<T, double>) {
      if (auto v = node->value<double>()) {
        target = *v;
        return;
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = node->value<std::string>()) {
        target = *v;
        return;
      }
    } else if constexpr (std::is_same_v<T, bool>) {
      if (auto v = node->value<bool>()) {
        target = *v;
        return;
      }
    } else {
      if (auto v = node->value<std::int64_t>()) {
        if (*v < 0 && std::is_unsigned_v<T>) throw UsageError("config key '" + std::string(key) + "' must be non-negative");
        target = static_cast<T>(*v);
        return;
      }
    }
    throw UsageError("config key '" + std::string(key) + "' has the wrong type");
  }
}

const toml::table* section(const toml::table& root, std::string_view name) {
  auto node = root.get(name);
  if (!node) return nullptr;
  auto t = node->as_table();
  if (!t) throw UsageError("config key '" + std::string(name) + "' must be a table");
  return t;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : (base / path).lexically_normal();
}

// --- stage plumbing -----------------------------------------------------------

struct Input {
  fs::path path;
  std::optional<Stage> producer;
};

struct StageSpec {
  std::vector<Input> inputs;
  std::vector<std::string> outputs;
  io::json params = io::json::object();
};

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  void write(const std::string& name, std::string_view content) { io::write_file_atomic(dir_ / name, content); }
  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
};

std::vector<io::json> read_jsonl_values(const fs::path& path) {
  std::vector<io::json> out;
  for (auto& l : io::parse_jsonl(io::read_file(path))) out.push_back(std::move(l.value));
  return out;
}

std::string jsonl(const std::vector<io::json>& values) { return io::to_jsonl(values); }

std::string pretty(const io::json& j) { return j.dump(2) + "\n"; }

std::string predictions_file(const std::string& source) { return "predictions_" + source + ".jsonl"; }

StageSpec spec_for(Stage stage, const PipelineConfig& c) {
  const auto out = c.out_dir;
  auto from = [&](const char* name, Stage producer) { return Input{out / name, producer}; };
  StageSpec s;
  switch (stage) {
    case Stage::Ingest:
      s.inputs = {{c.corpus, std::nullopt}};
      s.outputs = {"transcripts.jsonl", "sentences.jsonl", "rejections.jsonl", "corpus_stats.json"};
      break;
    case Stage::Filter:
      s.inputs = {{c.lexicon, std::nullopt}, from("sentences.jsonl", Stage::Ingest)};
      s.outputs = {"hits.jsonl", "filter_stats.json"};
      break;
    case Stage::BuildDocs:
      s.inputs = {from("transcripts.jsonl", Stage::Ingest), from("sentences.jsonl", Stage::Ingest),
                  from("hits.jsonl", Stage::Filter)};
      s.outputs = {"documents.jsonl"};
      s.params = {{"window", c.window}};
      break;
    case Stage::TrainBaseline:
      s.inputs = {{c.labeled, std::nullopt}};
      s.outputs = {"model.json", "split.json"};
      s.params = {{"seed", c.seed},
                  {"c", c.baseline.c},
                  {"alpha", c.baseline.alpha},
                  {"beta", c.baseline.beta},
                  {"tolerance", c.baseline.tolerance},
                  {"max_epochs", c.baseline.max_epochs},
                  {"bigrams", c.baseline.bigrams}};
      break;
    case Stage::Predict:
    case Stage::Eval: {
      io::json per_label = io::json::object();
      for (const auto& [a, t] : c.thresholds.per_label) per_label[std::string(name_of(a))] = t;
      s.params = {{"threshold", c.thresholds.default_threshold}, {"per_label", per_label}};
      if (stage == Stage::Predict) {
        s.inputs = {from("model.json", Stage::TrainBaseline), from("documents.jsonl", Stage::BuildDocs)};
        s.outputs = {predictions_file("baseline")};
      } else {
        s.inputs = {from("model.json", Stage::TrainBaseline), from("split.json", Stage::TrainBaseline),
                    {c.labeled, std::nullopt}};
        s.outputs = {"eval.json"};
      }
      break;
    }
    case Stage::ImportPreds:
      if (c.predictions.empty()) throw UsageError("import-preds needs a predictions file (paths.predictions or --predictions)");
      s.inputs = {{c.predictions, std::nullopt}, from("documents.jsonl", Stage::BuildDocs)};
      s.outputs = {predictions_file("imported")};
      break;
    case Stage::Aggregate:
      s.inputs = {from("documents.jsonl", Stage::BuildDocs),
                  {out / predictions_file(c.predictions_source),
                   c.predictions_source == "imported" ? Stage::ImportPreds : Stage::Predict}};
      s.outputs = {"occurrences.jsonl", "matrix.csv", "matrix.json"};
      s.params = {{"years", {c.years.first, c.years.last}},
                  {"denominator", c.denominator == aggregate::Denominator::Window ? "window" : "active"},
                  {"predictions_source", c.predictions_source}};
      break;
    case Stage::Cluster:
      s.inputs = {c.matrix.empty() ? from("matrix.csv", Stage::Aggregate) : Input{c.matrix, std::nullopt}};
      s.outputs = {"selected.csv",    "scaled.csv",    "embedding.csv", "silhouette.csv", "assignments.csv",
                   "profiles.json",   "cluster.json",  "scatter.svg",   "radar.svg"};
      s.params = {{"seed", c.seed},
                  {"density_threshold", c.density_threshold},
                  {"tsne", c.tsne.to_json()},
                  {"k_range", {c.k_min, c.k_max}},
                  {"k", c.k ? io::json(*c.k) : io::json(nullptr)},
                  {"space", c.cluster_on_embedding ? "embedding" : "scaled"},
                  {"include_mean_maturity", c.include_mean_maturity}};
      break;
    case Stage::Report:
      s.inputs = {from("cluster.json", Stage::Cluster),      from("assignments.csv", Stage::Cluster),
                  from("profiles.json", Stage::Cluster),     from("silhouette.csv", Stage::Cluster),
                  from("selected.csv", Stage::Cluster),      from("filter_stats.json", Stage::Filter)};
      s.outputs = {"report/summary.txt", "report/summary.json", "report/membership.csv", "report/radar.json",
                   "report/silhouette.csv"};
      break;
  }
  return s;
}

// --- stage bodies -------------------------------------------------------------

using Body = std::function<void(const PipelineConfig&, Outputs&, StageOutcome&)>;

void ingest(const PipelineConfig& c, Outputs& out, StageOutcome& o) {
  auto loaded = corpus::load_transcripts(c.corpus, corpus::format_from_path(c.corpus));
  std::vector<corpus::Sentence> sentences;
  std::vector<io::json> meta, sent, rej;
  for (const auto& t : loaded.transcripts) {
    meta.push_back(corpus::metadata_json(t));
    for (auto& s : corpus::split_sentences(t)) {
      sent.push_back(corpus::to_json(s));
      sentences.push_back(std::move(s));
    }
  }
  for (const auto& r : loaded.rejections) rej.push_back(corpus::to_json(r));
  auto stats = corpus::corpus_stats(loaded.transcripts, sentences);
  auto stats_json = corpus::to_json(stats);
  stats_json["input_rows"] = loaded.total_rows;
  stats_json["rejected_rows"] = loaded.rejections.size();
  out.write("transcripts.jsonl", jsonl(meta));
  out.write("sentences.jsonl", jsonl(sent));
  out.write("rejections.jsonl", jsonl(rej));
  out.write("corpus_stats.json", pretty(stats_json));
  o.counts = {{"transcripts", stats.transcript_count},
              {"companies", stats.company_count},
              {"sentences", stats.sentence_count},
              {"rejected_rows", loaded.rejections.size()}};
  for (const auto& r : loaded.rejections) o.messages.push_back("row " + std::to_string(r.row) + " rejected: " + r.reason);
}

void filter(const PipelineConfig& c, Outputs& out, StageOutcome& o) {
  auto lex = lexicon::compile_lexicon_file(c.lexicon);
  std::vector<corpus::Sentence> sentences;
  for (const auto& j : read_jsonl_values(out.path("sentences.jsonl"))) sentences.push_back(corpus::sentence_from_json(j));
  auto result = lexicon::filter_corpus(lex, sentences);
  std::vector<io::json> hits;
  for (const auto& h : result.hits) hits.push_back(lexicon::to_json(h, lex));
  out.write("hits.jsonl", jsonl(hits));
  io::json stats = {{"sentences", result.sentence_count},
                    {"matched_sentences", result.matched_sentences},
                    {"hits", result.hits.size()},
                    {"density", result.density},
                    {"lexicon_terms", lex.specs().size()},
                    {"lexicon_version_hash", lex.version_hash()}};
  out.write("filter_stats.json", pretty(stats));
  o.counts = {{"hits", result.hits.size()}, {"hit_sentences", result.matched_sentences}, {"density", result.density}};
}

void build_docs(const PipelineConfig& c, Outputs& out, StageOutcome& o) {
  docbuild::TranscriptTable table;
  for (const auto& j : read_jsonl_values(out.path("transcripts.jsonl")))
    table[j.at("transcript_id").get<std::string>()] = {j.at("ticker").get<std::string>(),
                                                        j.at("call_date").get<std::string>(), {}};
  for (const auto& j : read_jsonl_values(out.path("sentences.jsonl"))) {
    auto s = corpus::sentence_from_json(j);
    auto it = table.find(s.transcript_id);
    if (it == table.end() || it->second.sentences.size() != s.index)
      throw DataError("sentences.jsonl is inconsistent with transcripts.jsonl at " + s.transcript_id);
    it->second.sentences.push_back(std::move(s.text));
  }
  std::vector<lexicon::Hit> hits;
  for (const auto& j : read_jsonl_values(out.path("hits.jsonl"))) {
    lexicon::Hit h;
    h.transcript_id = j.at("transcript_id").get<std::string>();
    h.sentence_index = j.at("sentence_index").get<std::size_t>();
    auto topic = parse_aspect(j.at("topic").get<std::string>());
    if (!topic) throw DataError("hits.jsonl has unknown topic " + j.at("topic").get<std::string>());
    h.topic = *topic;
    hits.push_back(std::move(h));
  }
  auto docs = docbuild::build_documents(table, hits, c.window);
  std::vector<io::json> lines;
  for (const auto& d : docs) lines.push_back(docbuild::to_json(d));
  out.write("documents.jsonl", jsonl(lines));
  o.counts = {{"documents", docs.size()}};
}

std::vector<docbuild::Document> read_documents(const fs::path& path) {
  std::vector<docbuild::Document> docs;
  for (const auto& j : read_jsonl_values(path)) docs.push_back(docbuild::document_from_json(j));
  return docs;
}

void train(const PipelineConfig& c, Outputs& out, StageOutcome& o) {
  auto examples = classify::load_labeled(c.labeled);
  auto split = classify::split_dataset(examples, c.seed);
  auto cfg = c.baseline;
  cfg.seed = c.seed;
  auto model = classify::train_baseline(split.train, cfg);
  auto ids = [](const std::vector<classify::LabeledExample>& v) {
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(e.doc_id);
    return out;
  };
  out.write("model.json", model.to_json().dump() + "\n");
  out.write("split.json", pretty({{"seed", c.seed},
                                  {"train", ids(split.train)},
                                  {"validation", ids(split.validation)},
                                  {"test", ids(split.test)},
                                  {"warnings", split.warnings}}));
  o.counts = {{"examples", examples.size()},
              {"train", split.train.size()},
              {"validation", split.validation.size()},
              {"test", split.test.size()}};
  o.messages = split.warnings;
  o.messages.insert(o.messages.end(), model.warnings.begin(), model.warnings.end());
}

classify::BaselineModel read_model(const fs::path& path) {
  return classify::BaselineModel::from_json(io::json::parse(io::read_file(path)));
}

void count_predictions(const std::vector<classify::Prediction>& preds, StageOutcome& o) {
  std::size_t with = 0, occ = 0;
  for (const auto& p : preds) {
    with += !p.aspects.empty();
    occ += p.aspects.size();
  }
  o.counts = {{"predictions", preds.size()}, {"documents_with_aspects", with}, {"aspect_occurrences", occ}};
}

void predict(const PipelineConfig& c, Outputs& out, StageOutcome& o) {
  auto model = read_model(out.path("model.json"));
  auto docs = read_documents(out.path("documents.jsonl"));
  auto preds = classify::predict(model, classify::items_of(docs), c.thresholds);
  out.write(predictions_file("baseline"), classify::export_predictions(preds));
  count_predictions(preds, o);
}

void import_preds(const PipelineConfig& c, Outputs& out, StageOutcome& o) {
  auto docs = read_documents(out.path("documents.jsonl"));
  auto preds = classify::import_predictions(c.predictions, docs);
  out.write(predictions_file("imported"), classify::export_predictions(preds));
  count_predictions(preds, o);
}

void eval(const PipelineConfig& c, Outputs& out, StageOutcome& o) {
  auto model = read_model(out.path("model.json"));
  auto split = io::json::parse(io::read_file(out.path("split.json")));
  auto test_ids = split.at("test").get<std::vector<std::string>>();
  std::set<std::string> wanted(test_ids.begin(), test_ids.end());
  std::vector<classify::LabeledExample> gold;
  for (auto& e : classify::load_labeled(c.labeled))
    if (wanted.count(e.doc_id)) gold.push_back(std::move(e));
  if (gold.size() != wanted.size()) throw DataError("split.json references doc_ids missing from the labelled data");
  auto preds = classify::predict(model, classify::items_of(gold), c.thresholds);
  auto report = classify::evaluate(preds, gold);
  auto j = classify::to_json(report);
  j["partition"] = "test";
  j["documents"] = gold.size();
  out.write("eval.json", pretty(j));
  o.counts = {{"test_documents", gold.size()},
              {"aspect_f1_weighted", report.aspect.f1},
              {"maturity_f1_weighted", report.maturity.f1}};
}

void run_aggregate(const PipelineConfig& c, Outputs& out, StageOutcome& o) {
  auto docs = read_documents(out.path("documents.jsonl"));
  std::set<std::string> ids;
  for (const auto& d : docs) ids.insert(d.doc_id);
  auto preds = classify::import_predictions(io::read_file(out.path(predictions_file(c.predictions_source))), ids);
  auto occ = aggregate::encode_occurrences(preds, docs);
  std::vector<io::json> lines;
  for (const auto& x : occ)
    lines.push_back({{"company", x.company},
                     {"year", x.year},
                     {"aspect", std::string(name_of(x.aspect))},
                     {"maturity", value_of(x.maturity)}});
  auto matrix = aggregate::company_matrix(occ, c.years, c.denominator);
  out.write("occurrences.jsonl", jsonl(lines));
  out.write("matrix.csv", aggregate::to_csv(matrix));
  out.write("matrix.json", pretty(aggregate::sidecar_json(matrix)));
  o.counts = {{"occurrences", occ.size()},
              {"occurrences_out_of_window", matrix.out_of_window},
              {"companies", matrix.companies.size()}};
  if (matrix.out_of_window)
    o.messages.push_back(std::to_string(matrix.out_of_window) + " occurrences outside the year window were excluded");
}

void cluster(const PipelineConfig& c, Outputs& out, StageOutcome& o) {
  using namespace clusterkit;
  auto matrix = parse_feature_csv(io::read_file(c.matrix.empty() ? out.path("matrix.csv") : c.matrix));
  if (!c.include_mean_maturity) matrix = drop_columns(matrix, {"mean_maturity"});
  auto selection = select_dense_features(matrix, c.density_threshold);
  auto scaling = scale(selection.matrix);

  Matrix points = scaling.matrix.values;
  io::json tsne_meta = nullptr;
  Matrix embedding;
  {
    auto t = tsne(scaling.matrix.values, c.tsne);
    auto [lo, hi] = std::minmax_element(t.row_perplexity.begin(), t.row_perplexity.end());
    tsne_meta = {{"config", c.tsne.to_json()},
                 {"row_perplexity_min", *lo},
                 {"row_perplexity_max", *hi},
                 {"kl_after_exaggeration", t.kl_after_exaggeration},
                 {"kl_final", t.kl_final}};
    embedding = t.embedding;
    if (c.cluster_on_embedding) points = embedding;
  }

  auto sweep = sweep_k(points, c.k_min, c.k_max, c.seed);
  const int k = c.k.value_or(sweep.best_k);
  ClusterResult chosen;
  if (k >= c.k_min && k <= c.k_max) {
    chosen = sweep.results[static_cast<std::size_t>(k - c.k_min)];
  } else {
    chosen = kmeans(points, k, c.seed + static_cast<std::uint64_t>(k));
    chosen.silhouette = silhouette(points, chosen.assignments);
  }
  auto profile = profile_clusters(selection.matrix, chosen.assignments, k);

  const auto& ids = matrix.row_ids;
  std::string emb = io::csv_line({"ticker", "x", "y"});
  for (Eigen::Index i = 0; i < embedding.rows(); ++i)
    emb += io::csv_line({ids[static_cast<std::size_t>(i)], io::format_double(embedding(i, 0)),
                         io::format_double(embedding(i, 1))});
  std::string assign = io::csv_line({"ticker", "cluster"});
  for (std::size_t i = 0; i < ids.size(); ++i) assign += io::csv_line({ids[i], std::to_string(chosen.assignments[i])});
  std::string curve = io::csv_line({"k", "score"});
  for (std::size_t i = 0; i < sweep.ks.size(); ++i)
    curve += io::csv_line({std::to_string(sweep.ks[i]), io::format_double(sweep.scores[i])});

  std::vector<std::size_t> sizes;
  for (const auto& m : profile.members) sizes.push_back(m.size());
  std::vector<io::json> ranges;
  for (const auto& [lo, hi] : scaling.ranges) ranges.push_back({lo, hi});
  io::json meta = {{"k", k},
                   {"chosen_by", c.k ? "flag" : "global_maximum"},
                   {"silhouette", *chosen.silhouette},
                   {"inertia", chosen.inertia},
                   {"cluster_sizes", sizes},
                   {"best_k", sweep.best_k},
                   {"peaks", sweep.peaks},
                   {"space", c.cluster_on_embedding ? "embedding" : "scaled"},
                   {"rows", ids.size()},
                   {"kept_features", selection.kept},
                   {"dropped_features", selection.dropped},
                   {"densities", selection.densities},
                   {"density_threshold", c.density_threshold},
                   {"scaling", {{"transform", "log1p then min-max"}, {"log_ranges", ranges}}},
                   {"tsne", tsne_meta}};

  const auto stamp = now_iso();
  out.write("selected.csv", to_csv(selection.matrix));
  out.write("scaled.csv", to_csv(scaling.matrix));
  out.write("embedding.csv", emb);
  out.write("silhouette.csv", curve);
  out.write("assignments.csv", assign);
  out.write("profiles.json", pretty(radar_json(profile)));
  out.write("cluster.json", pretty(meta));
  out.write("scatter.svg", scatter_svg(embedding, ids, chosen.assignments, stamp));
  out.write("radar.svg", radar_svg(profile, stamp));
  o.counts = {{"companies", ids.size()},
              {"features_kept", selection.kept.size()},
              {"k", k},
              {"silhouette", *chosen.silhouette}};
}

void report(const PipelineConfig&, Outputs& out, StageOutcome& o) {
  auto meta = io::json::parse(io::read_file(out.path("cluster.json")));
  auto profiles = io::json::parse(io::read_file(out.path("profiles.json")));
  auto filter_stats = io::json::parse(io::read_file(out.path("filter_stats.json")));
  auto matrix_rows = io::parse_csv(io::read_file(out.path("selected.csv"))).size() - 1;
  auto assignments = io::parse_csv(io::read_file(out.path("assignments.csv")));
  const int k = meta.at("k").get<int>();

  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  std::string membership = io::csv_line({"cluster", "ticker"});
  std::vector<std::pair<int, std::string>> members;
  for (std::size_t r = 1; r < assignments.size(); ++r) {
    int cl = std::stoi(assignments[r].fields.at(1));
    if (cl < 0 || cl >= k) throw DataError("assignments.csv has a cluster label outside 0.." + std::to_string(k - 1));
    ++sizes[static_cast<std::size_t>(cl)];
    members.emplace_back(cl, assignments[r].fields.at(0));
  }
  std::sort(members.begin(), members.end());
  for (const auto& [cl, t] : members) membership += io::csv_line({std::to_string(cl), t});

  std::size_t total = 0;
  for (auto s : sizes) total += s;
  if (total != matrix_rows)
    throw DataError("cluster sizes sum to " + std::to_string(total) + " but the matrix has " +
                    std::to_string(matrix_rows) + " rows");
  if (profiles.at("series").size() != static_cast<std::size_t>(k))
    throw DataError("radar series count does not match k");

  auto fixed = [](double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return std::string(buf);
  };
  std::ostringstream text;
  text << "Digital strategy maturity report\n\n";
  text << "Digital sentence density: " << fixed(filter_stats.at("density").get<double>(), 5) << " ("
       << filter_stats.at("matched_sentences").get<std::size_t>() << " of " << filter_stats.at("sentences").get<std::size_t>()
       << " sentences)\n";
  text << "Companies clustered: " << matrix_rows << "\n";
  text << "Features: " << meta.at("kept_features").size() << " kept, " << meta.at("dropped_features").size()
       << " dropped (density threshold " << fixed(meta.at("density_threshold").get<double>(), 2) << ")\n";
  text << "k = " << k << " (" << meta.at("chosen_by").get<std::string>() << "), silhouette "
       << fixed(meta.at("silhouette").get<double>(), 4) << "\n";
  text << "Silhouette peaks at k:";
  for (const auto& p : meta.at("peaks")) text << " " << p.get<int>();
  text << "\n\nCluster sizes:\n";
  for (int c = 0; c < k; ++c) text << "  cluster " << c << ": " << sizes[static_cast<std::size_t>(c)] << "\n";
  text << "\nPer-cluster mean maturity (raw scores):\n";
  const auto& features = profiles.at("features");
  for (const auto& s : profiles.at("series")) {
    text << "  cluster " << s.at("cluster").get<int>() << ":";
    for (std::size_t f = 0; f < features.size(); ++f)
      text << " " << features[f].get<std::string>() << "=" << fixed(s.at("values")[f].get<double>(), 2);
    text << "\n";
  }

  io::json summary = {{"k", k},
                      {"silhouette", meta.at("silhouette")},
                      {"chosen_by", meta.at("chosen_by")},
                      {"peaks", meta.at("peaks")},
                      {"cluster_sizes", sizes},
                      {"companies", matrix_rows},
                      {"density", filter_stats.at("density")},
                      {"matched_sentences", filter_stats.at("matched_sentences")},
                      {"sentences", filter_stats.at("sentences")}};
  out.write("report/summary.txt", text.str());
  out.write("report/summary.json", pretty(summary));
  out.write("report/membership.csv", membership);
  out.write("report/radar.json", pretty(profiles));
  out.write("report/silhouette.csv", io::read_file(out.path("silhouette.csv")));
  o.counts = {{"k", k}, {"companies", matrix_rows}};
}

Body body_for(Stage s) {
  switch (s) {
    case Stage::Ingest: return ingest;
    case Stage::Filter: return filter;
    case Stage::BuildDocs: return build_docs;
    case Stage::TrainBaseline: return train;
    case Stage::Predict: return predict;
    case Stage::ImportPreds: return import_preds;
    case Stage::Eval: return eval;
    case Stage::Aggregate: return run_aggregate;
    case Stage::Cluster: return cluster;
    case Stage::Report: return report;
  }
  throw Error("unknown stage");
}

io::json load_manifest(const fs::path& out_dir) {
  auto path = out_dir / kManifest;
  if (!fs::exists(path)) return {{"stages", io::json::object()}};
  try {
    return io::json::parse(io::read_file(path));
  } catch (const io::json::exception& e) {
    throw DataError("manifest.json is not valid JSON: " + std::string(e.what()));
  }
}

std::string key_of(const fs::path& p) { return p.lexically_normal().generic_string(); }

}  // namespace

// --- public API ---------------------------------------------------------------

PipelineConfig PipelineConfig::from_toml_file(const fs::path& path) {
  return from_toml(io::read_file(path), fs::absolute(path).parent_path());
}

PipelineConfig PipelineConfig::from_toml(std::string_view text, const fs::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "invalid TOML config: " << e.description() << " (line " << e.source().begin.line << ")";
    throw UsageError(msg.str());
  }
  check_keys(root, "", {"seed", "out_dir", "paths", "docbuild", "classify", "aggregate", "cluster"});
  PipelineConfig c;
  read(root, "seed", c.seed);
  std::string out_dir = c.out_dir.string();
  read(root, "out_dir", out_dir);
  c.out_dir = resolve(base_dir, out_dir);

  if (auto t = section(root, "paths")) {
    check_keys(*t, "paths", {"corpus", "lexicon", "labeled", "predictions", "matrix"});
    std::string corpus, lex, labeled, preds, matrix;
    read(*t, "matrix", matrix);
    c.matrix = resolve(base_dir, matrix);
    read(*t, "corpus", corpus);
    read(*t, "lexicon", lex);
    read(*t, "labeled", labeled);
    read(*t, "predictions", preds);
    c.corpus = resolve(base_dir, corpus);
    c.lexicon = resolve(base_dir, lex);
    c.labeled = resolve(base_dir, labeled);
    c.predictions = resolve(base_dir, preds);
  }
  if (auto t = section(root, "docbuild")) {
    check_keys(*t, "docbuild", {"window"});
    read(*t, "window", c.window);
  }
  if (auto t = section(root, "classify")) {
    check_keys(*t, "classify",
               {"threshold", "thresholds", "predictions_source", "c", "alpha", "beta", "tolerance", "max_epochs", "bigrams"});
    read(*t, "threshold", c.thresholds.default_threshold);
    read(*t, "predictions_source", c.predictions_source);
    read(*t, "c", c.baseline.c);
    read(*t, "alpha", c.baseline.alpha);
    read(*t, "beta", c.baseline.beta);
    read(*t, "tolerance", c.baseline.tolerance);
    read(*t, "max_epochs", c.baseline.max_epochs);
    read(*t, "bigrams", c.baseline.bigrams);
    if (auto per = section(*t, "thresholds")) {
      for (const auto& [key, node] : *per) {
        auto a = parse_aspect(key.str());
        if (!a) throw UsageError("unknown aspect in classify.thresholds: " + std::string(key.str()));
        auto v = node.value<double>();
        if (!v) throw UsageError("classify.thresholds." + std::string(key.str()) + " must be a number");
        c.thresholds.per_label[*a] = *v;
      }
    }
  }
  if (auto t = section(root, "aggregate")) {
    check_keys(*t, "aggregate", {"first_year", "last_year", "denominator"});
    read(*t, "first_year", c.years.first);
    read(*t, "last_year", c.years.last);
    std::string denom = "window";
    read(*t, "denominator", denom);
    if (denom == "window") c.denominator = aggregate::Denominator::Window;
    else if (denom == "active") c.denominator = aggregate::Denominator::Active;
    else throw UsageError("aggregate.denominator must be 'window' or 'active'");
  }
  if (auto t = section(root, "cluster")) {
    check_keys(*t, "cluster",
               {"threshold", "perplexity", "learning_rate", "iterations", "tsne_seed", "early_exaggeration",
                "early_exaggeration_iters", "k_min", "k_max", "k", "space", "include_mean_maturity"});
    read(*t, "threshold", c.density_threshold);
    read(*t, "perplexity", c.tsne.perplexity);
    read(*t, "learning_rate", c.tsne.learning_rate);
    read(*t, "iterations", c.tsne.iterations);
    read(*t, "tsne_seed", c.tsne.seed);
    read(*t, "early_exaggeration", c.tsne.early_exaggeration);
    read(*t, "early_exaggeration_iters", c.tsne.early_exaggeration_iters);
    c.tsne.momentum_switch_iter = c.tsne.early_exaggeration_iters;
    read(*t, "k_min", c.k_min);
    read(*t, "k_max", c.k_max);
    int k = 0;
    read(*t, "k", k);
    if (k > 0) c.k = k;
    std::string space = "embedding";
    read(*t, "space", space);
    if (space == "embedding") c.cluster_on_embedding = true;
    else if (space == "scaled") c.cluster_on_embedding = false;
    else throw UsageError("cluster.space must be 'embedding' or 'scaled'");
    read(*t, "include_mean_maturity", c.include_mean_maturity);
  }
  if (c.predictions_source != "baseline" && c.predictions_source != "imported")
    throw UsageError("classify.predictions_source must be 'baseline' or 'imported'");
  return c;
}

io::json PipelineConfig::to_json() const {
  io::json per_label = io::json::object();
  for (const auto& [a, t] : thresholds.per_label) per_label[std::string(name_of(a))] = t;
  return {{"seed", seed},
          {"out_dir", key_of(out_dir)},
          {"paths",
           {{"corpus", key_of(corpus)},
            {"lexicon", key_of(lexicon)},
            {"labeled", key_of(labeled)},
            {"predictions", key_of(predictions)},
            {"matrix", key_of(matrix)}}},
          {"docbuild", {{"window", window}}},
          {"classify",
           {{"threshold", thresholds.default_threshold},
            {"thresholds", per_label},
            {"predictions_source", predictions_source},
            {"c", baseline.c},
            {"alpha", baseline.alpha},
            {"beta", baseline.beta},
            {"tolerance", baseline.tolerance},
            {"max_epochs", baseline.max_epochs},
            {"bigrams", baseline.bigrams}}},
          {"aggregate",
           {{"first_year", years.first},
            {"last_year", years.last},
            {"denominator", denominator == aggregate::Denominator::Window ? "window" : "active"}}},
          {"cluster",
           {{"threshold", density_threshold},
            {"tsne", tsne.to_json()},
            {"k_min", k_min},
            {"k_max", k_max},
            {"k", k ? io::json(*k) : io::json(nullptr)},
            {"space", cluster_on_embedding ? "embedding" : "scaled"},
            {"include_mean_maturity", include_mean_maturity}}}};
}

std::string_view name_of(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Filter: return "filter";
    case Stage::BuildDocs: return "build-docs";
    case Stage::TrainBaseline: return "train-baseline";
    case Stage::Predict: return "predict";
    case Stage::ImportPreds: return "import-preds";
    case Stage::Eval: return "eval";
    case Stage::Aggregate: return "aggregate";
    case Stage::Cluster: return "cluster";
    case Stage::Report: return "report";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (auto s : kAllStages)
    if (name_of(s) == name) return s;
  return std::nullopt;
}

StageOutcome run_stage(Stage stage, const PipelineConfig& config, const RunOptions& options) {
  const auto spec = spec_for(stage, config);
  for (const auto& in : spec.inputs) {
    if (in.path.empty()) throw UsageError(std::string(name_of(stage)) + ": an input path is not configured");
    if (!fs::exists(in.path)) {
      if (in.producer) throw DataError("missing stage: " + std::string(name_of(*in.producer)));
      throw DataError("missing input file: " + in.path.string());
    }
  }

  auto manifest = load_manifest(config.out_dir);
  const auto stage_name = std::string(name_of(stage));
  const auto params_digest = io::sha256_hex(spec.params.dump());
  io::json input_digests = io::json::object();
  for (const auto& in : spec.inputs) input_digests[key_of(in.path)] = io::file_sha256(in.path);

  if (options.strict) {
    for (const auto& in : spec.inputs) {
      if (!in.producer) continue;
      const auto producer = std::string(name_of(*in.producer));
      const auto name = in.path.lexically_relative(config.out_dir).generic_string();
      const auto recorded = manifest["stages"].value(producer, io::json::object()).value("outputs", io::json::object());
      if (recorded.contains(name) && recorded[name].get<std::string>() != input_digests[key_of(in.path)].get<std::string>())
        throw DataError("digest mismatch for " + in.path.string() + " (recorded by stage " + producer + ")");
    }
  }

  StageOutcome outcome;
  outcome.stage = stage;
  if (manifest["stages"].contains(stage_name)) {
    const auto entry = manifest["stages"][stage_name];
    bool current = entry.value("params_digest", "") == params_digest && entry.value("inputs", io::json()) == input_digests;
    for (const auto& name : spec.outputs) {
      auto path = config.out_dir / name;
      auto recorded = entry.contains("outputs") && entry["outputs"].contains(name) ? entry["outputs"][name].get<std::string>()
                                                                                  : std::string();
      if (!fs::exists(path)) {
        current = false;
        continue;
      }
      if (io::file_sha256(path) != recorded) {
        if (options.strict) throw DataError("digest mismatch for " + path.string() + " (recorded by stage " + stage_name + ")");
        current = false;
      }
    }
    if (current && !options.force) {
      outcome.skipped = true;
      outcome.counts = entry.value("counts", io::json::object());
      outcome.messages.push_back("up-to-date");
      return outcome;
    }
  }

  const auto started = now_iso();
  Outputs outputs(config.out_dir);
  body_for(stage)(config, outputs, outcome);

  io::json output_digests = io::json::object();
  for (const auto& name : spec.outputs) output_digests[name] = io::file_sha256(config.out_dir / name);
  manifest["seed"] = config.seed;
  manifest["config"] = config.to_json();
  if (stage == Stage::Filter) {
    auto stats = io::json::parse(io::read_file(config.out_dir / "filter_stats.json"));
    manifest["lexicon_version_hash"] = stats.at("lexicon_version_hash");
  }
  manifest["stages"][stage_name] = {{"params", spec.params},
                        {"params_digest", params_digest},
                        {"inputs", input_digests},
                        {"outputs", output_digests},
                        {"counts", outcome.counts},
                        {"started", started},
                        {"finished", now_iso()}};
  io::write_file_atomic(config.out_dir / kManifest, manifest.dump(2) + "\n");
  return outcome;
}

std::vector<StageOutcome> run_all(const PipelineConfig& config, const RunOptions& options) {
  std::vector<StageOutcome> out;
  for (auto s : kAllStages) {
    if (s == Stage::ImportPreds && config.predictions.empty()) continue;
    out.push_back(run_stage(s, config, options));
  }
  return out;
}

std::vector<std::string> verify_manifest(const fs::path& out_dir) {
  std::vector<std::string> problems;
  auto manifest = load_manifest(out_dir);
  const auto stages = manifest.value("stages", io::json::object());
  for (const auto& [stage, entry] : stages.items()) {
    const auto inputs = entry.value("inputs", io::json::object());
    const auto outputs = entry.value("outputs", io::json::object());
    for (const auto& [path, digest] : inputs.items()) {
      if (!fs::exists(path)) problems.push_back(stage + ": input missing: " + path);
      else if (io::file_sha256(path) != digest.get<std::string>()) problems.push_back(stage + ": input changed: " + path);
    }
    for (const auto& [name, digest] : outputs.items()) {
      auto path = out_dir / name;
      if (!fs::exists(path)) problems.push_back(stage + ": output missing: " + name);
      else if (io::file_sha256(path) != digest.get<std::string>()) problems.push_back(stage + ": output changed: " + name);
    }
  }
  return problems;
}

std::vector<std::string> deterministic_outputs() {
  std::vector<std::string> out;
  PipelineConfig c;
  c.predictions = "external.jsonl";
  for (auto s : kAllStages)
    for (auto& name : spec_for(s, c).outputs)
      if (name.size() < 4 || name.substr(name.size() - 4) != ".svg") out.push_back(name);
  return out;
}

}  // namespace abma::pipeline

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "abma/corpus.hpp"
#include "abma/error.hpp"
#include "abma/io.hpp"
#include "abma/lexicon.hpp"
#include "abma/pipeline.hpp"

namespace pl = abma::pipeline;
namespace io = abma::io;

namespace {

struct RangeArg {
  int lo = 0, hi = 0;
};

RangeArg parse_range(const std::string& text, const char* flag) {
  auto dots = text.find("..");
  RangeArg r;
  if (dots == std::string::npos) throw abma::UsageError(std::string(flag) + " expects a..b, got '" + text + "'");
  auto a = text.substr(0, dots), b = text.substr(dots + 2);
  auto ok = [](const std::string& s, int& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
  };
  if (!ok(a, r.lo) || !ok(b, r.hi) || r.lo > r.hi)
    throw abma::UsageError(std::string(flag) + " expects a..b with a <= b, got '" + text + "'");
  return r;
}

void print_outcome(const pl::StageOutcome& o) {
  std::cout << pl::name_of(o.stage) << ": " << (o.skipped ? "up-to-date" : "done");
  for (const auto& [k, v] : o.counts.items()) std::cout << " " << k << "=" << v.dump();
  std::cout << "\n";
  for (const auto& m : o.messages)
    if (m != "up-to-date") std::cerr << "  " << pl::name_of(o.stage) << ": " << m << "\n";
}

// Standalone lexicon filter over an existing sentences.jsonl.
int filter_file(const std::string& lexicon, const std::string& sentences, const std::string& out) {
  if (lexicon.empty()) throw abma::UsageError("filter --sentences needs --lexicon");
  if (out.empty()) throw abma::UsageError("filter --sentences needs --out <file>");
  auto lex = abma::lexicon::compile_lexicon_file(lexicon);
  std::vector<abma::corpus::Sentence> input;
  for (const auto& l : io::parse_jsonl(io::read_file(sentences)))
    input.push_back(abma::corpus::sentence_from_json(l.value));
  auto result = abma::lexicon::filter_corpus(lex, input);
  std::vector<io::json> lines;
  for (const auto& h : result.hits) lines.push_back(abma::lexicon::to_json(h, lex));
  io::write_file_atomic(out, io::to_jsonl(lines));
  std::fprintf(stderr, "density %.5f (%zu of %zu sentences)\n", result.density, result.matched_sentences,
               result.sentence_count);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aspect-based maturity analysis pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, corpus, lexicon, labeled, predictions;
  std::optional<std::uint64_t> seed;
  pl::RunOptions run;
  app.add_option("--config", config_path, "TOML config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--force", run.force, "re-run stages even when up to date");
  app.add_flag("--strict", run.strict, "fail on output digest mismatches");
  app.add_option("--corpus", corpus, "transcript corpus (csv or jsonl)");
  app.add_option("--lexicon", lexicon, "lexicon csv");
  app.add_option("--labeled", labeled, "labelled examples (jsonl)");
  app.add_option("--predictions", predictions, "external predictions (jsonl)");

  std::map<std::string, CLI::App*> subs;
  for (auto s : pl::kAllStages) {
    auto name = std::string(pl::name_of(s));
    subs[name] = app.add_subcommand(name, "run the " + name + " stage");
  }
  auto* run_cmd = app.add_subcommand("run", "run every stage in order");
  auto* verify_cmd = app.add_subcommand("verify", "recompute the digests recorded in the manifest");

  std::string sentences_file, filter_out;
  subs["filter"]->add_option("--sentences", sentences_file, "sentences.jsonl for standalone filtering")
      ->check(CLI::ExistingFile);
  subs["filter"]->add_option("--out", filter_out, "hits file (with --sentences) or output directory");

  std::optional<double> threshold;
  for (auto name : {"predict", "eval"}) subs[name]->add_option("--threshold", threshold, "aspect score threshold");
  std::string source;
  subs["aggregate"]->add_option("--source", source, "predictions to aggregate")->check(CLI::IsMember({"baseline", "imported"}));
  std::string denominator, years;
  subs["aggregate"]->add_option("--denominator", denominator)->check(CLI::IsMember({"window", "active"}));
  subs["aggregate"]->add_option("--years", years, "first..last");

  std::string matrix, k_range, space;
  std::optional<double> density, perplexity, lr;
  std::optional<int> iters, k;
  std::optional<std::uint64_t> cluster_seed;
  auto* cl = subs["cluster"];
  cl->add_option("--matrix", matrix, "feature matrix csv")->check(CLI::ExistingFile);
  cl->add_option("--threshold", density, "minimum non-zero density to keep a feature");
  cl->add_option("--perplexity", perplexity);
  cl->add_option("--lr", lr);
  cl->add_option("--iters", iters);
  cl->add_option("--seed", cluster_seed);
  cl->add_option("--k-range", k_range, "kmin..kmax");
  cl->add_option("--k", k, "fix k instead of taking the global silhouette maximum");
  cl->add_option("--space", space)->check(CLI::IsMember({"embedding", "scaled"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (subs["filter"]->parsed() && !sentences_file.empty()) return filter_file(lexicon, sentences_file, filter_out);

    pl::PipelineConfig config = config_path.empty() ? pl::PipelineConfig{} : pl::PipelineConfig::from_toml_file(config_path);
    if (seed) {
      config.seed = *seed;
      config.tsne.seed = *seed;
    }
    if (cluster_seed) {
      config.seed = *cluster_seed;
      config.tsne.seed = *cluster_seed;
    }
    if (!filter_out.empty()) config.out_dir = filter_out;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!corpus.empty()) config.corpus = corpus;
    if (!lexicon.empty()) config.lexicon = lexicon;
    if (!labeled.empty()) config.labeled = labeled;
    if (!predictions.empty()) config.predictions = predictions;
    if (threshold) config.thresholds.default_threshold = *threshold;
    if (!source.empty()) config.predictions_source = source;
    if (!denominator.empty())
      config.denominator = denominator == "window" ? abma::aggregate::Denominator::Window : abma::aggregate::Denominator::Active;
    if (!years.empty()) {
      auto r = parse_range(years, "--years");
      config.years = {r.lo, r.hi};
    }
    if (!matrix.empty()) config.matrix = matrix;
    if (density) config.density_threshold = *density;
    if (perplexity) config.tsne.perplexity = *perplexity;
    if (lr) config.tsne.learning_rate = *lr;
    if (iters) config.tsne.iterations = *iters;
    if (!k_range.empty()) {
      auto r = parse_range(k_range, "--k-range");
      config.k_min = r.lo;
      config.k_max = r.hi;
    }
    if (k) config.k = *k;
    if (!space.empty()) config.cluster_on_embedding = space == "embedding";

    if (verify_cmd->parsed()) {
      auto problems = pl::verify_manifest(config.out_dir);
      for (const auto& p : problems) std::cerr << p << "\n";
      if (!problems.empty()) return 2;
      std::cout << "manifest ok\n";
      return 0;
    }
    if (run_cmd->parsed()) {
      for (const auto& o : pl::run_all(config, run)) print_outcome(o);
      return 0;
    }
    for (auto s : pl::kAllStages)
      if (subs[std::string(pl::name_of(s))]->parsed()) print_outcome(pl::run_stage(s, config, run));
    return 0;
  } catch (const abma::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const abma::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

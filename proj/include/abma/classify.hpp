#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abma/docbuild.hpp"
#include "abma/io.hpp"
#include "abma/labels.hpp"

namespace abma::classify {

/// A hand-labelled training record. Negative records carry no aspects and no
/// maturity: keyword-relevant text that describes no concrete activity.
struct LabeledExample {
  std::string doc_id;
  std::string text;
  std::set<Aspect> aspects;
  std::optional<Maturity> maturity;

  bool is_negative() const { return !maturity.has_value(); }
};

std::vector<LabeledExample> parse_labeled(std::string_view jsonl);
std::vector<LabeledExample> load_labeled(const std::filesystem::path& path);
io::json to_json(const LabeledExample& ex);

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> validation;
  std::vector<LabeledExample> test;
  std::vector<std::string> warnings;
};

/// Disjoint 80/10/10 partition: test and validation each take floor(n/10)
/// examples. Stratified on maturity (negatives form their own stratum) by
/// evenly spaced picks from a class-sorted, seeded shuffle.
DatasetSplit split_dataset(const std::vector<LabeledExample>& examples, std::uint64_t seed);

/// Lowercased word tokens; featurization adds adjacent-pair bigrams.
std::vector<std::string> tokenize(std::string_view text);

struct BaselineConfig {
  double c = 1.0;         // SVM cost
  double alpha = 1.0;     // NB count smoothing
  double beta = 0.25;     // interpolation towards the mean weight magnitude
  double tolerance = 1e-3;
  int max_epochs = 1000;
  std::uint64_t seed = 42;
  bool bigrams = true;
};

/// One binary one-vs-rest head over NB-scaled binary features. A head whose
/// training labels are all one class stores its prior instead of weights.
struct LinearHead {
  std::vector<double> weights;  // NB ratio already folded in
  double bias = 0.0;
  std::optional<double> constant_score;

  double margin(const std::vector<std::uint32_t>& features) const;
};

struct BaselineModel {
  BaselineConfig config;
  std::vector<std::string> vocabulary;
  std::array<LinearHead, kAspectCount> aspect_heads;
  std::array<LinearHead, kMaturityCount> maturity_heads;
  std::vector<std::string> warnings;

  /// Sorted, unique vocabulary ids of the tokens present in `text`.
  std::vector<std::uint32_t> featurize(std::string_view text) const;

  io::json to_json() const;
  static BaselineModel from_json(const io::json& j);
};

/// Throws DataError when `train` is empty or contains no positive example.
BaselineModel train_baseline(const std::vector<LabeledExample>& train, const BaselineConfig& config = {});

enum class Source { Baseline, Imported };

std::string_view name_of(Source s);

struct Prediction {
  std::string doc_id;
  /// Included aspects with their scores, ordered by aspect.
  std::vector<std::pair<Aspect, double>> aspects;
  std::array<double, kMaturityCount> maturity_scores{};
  Source source = Source::Baseline;

  Maturity maturity() const;
  std::set<Aspect> aspect_set() const;
};

struct Thresholds {
  double default_threshold = 0.5;
  std::map<Aspect, double> per_label;

  double for_label(Aspect a) const;
};

/// Input unit for prediction; documents and labelled examples both map to it.
struct TextItem {
  std::string doc_id;
  std::string text;
};

std::vector<TextItem> items_of(const std::vector<docbuild::Document>& docs);
std::vector<TextItem> items_of(const std::vector<LabeledExample>& examples);

std::vector<Prediction> predict(const BaselineModel& model, const std::vector<TextItem>& items,
                                const Thresholds& thresholds = {});

io::json to_json(const Prediction& p);
std::string export_predictions(const std::vector<Prediction>& predictions);

/// Validates every record against the prediction contract; the result is
/// marked as imported.
std::vector<Prediction> import_predictions(std::string_view jsonl, const std::set<std::string>& known_doc_ids);
std::vector<Prediction> import_predictions(const std::filesystem::path& path,
                                           const std::vector<docbuild::Document>& docs);

struct LabelMetrics {
  std::string label;
  std::size_t support = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct TaskMetrics {
  std::vector<LabelMetrics> labels;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  TaskMetrics aspect;
  TaskMetrics maturity;
  /// Rows are gold classes, columns predicted classes; the fifth column
  /// counts gold documents without a prediction.
  std::array<std::array<std::size_t, kMaturityCount + 1>, kMaturityCount> confusion{};
  std::size_t missing_predictions = 0;
  std::size_t unmatched_predictions = 0;
};

/// Per-label precision, recall and F1 (0/0 counts as 0) with support-weighted
/// aggregates. Gold documents without a prediction count as all-negative
/// aspects and an abstained maturity.
EvalReport evaluate(const std::vector<Prediction>& predictions, const std::vector<LabeledExample>& gold);

io::json to_json(const EvalReport& report);

}  // namespace abma::classify

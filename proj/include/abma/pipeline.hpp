#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abma/aggregate.hpp"
#include "abma/classify.hpp"
#include "abma/clusterkit.hpp"
#include "abma/io.hpp"

namespace abma::pipeline {

namespace fs = std::filesystem;

struct PipelineConfig {
  fs::path corpus;
  fs::path lexicon;
  fs::path labeled;
  fs::path predictions;  // external predictions for import-preds; optional
  fs::path matrix;       // cluster input override; defaults to the aggregate output
  fs::path out_dir = "out";
  std::uint64_t seed = 42;

  std::size_t window = 1;

  classify::Thresholds thresholds;
  classify::BaselineConfig baseline;
  std::string predictions_source = "baseline";

  aggregate::YearWindow years;
  aggregate::Denominator denominator = aggregate::Denominator::Window;

  double density_threshold = 0.40;
  clusterkit::TsneConfig tsne;
  int k_min = 2;
  int k_max = 15;
  std::optional<int> k;
  bool cluster_on_embedding = true;
  bool include_mean_maturity = false;

  /// Relative paths resolve against the config file's directory.
  static PipelineConfig from_toml_file(const fs::path& path);
  static PipelineConfig from_toml(std::string_view text, const fs::path& base_dir = {});

  io::json to_json() const;
};

enum class Stage {
  Ingest,
  Filter,
  BuildDocs,
  TrainBaseline,
  Predict,
  ImportPreds,
  Eval,
  Aggregate,
  Cluster,
  Report,
};

inline constexpr std::array<Stage, 10> kAllStages = {Stage::Ingest,      Stage::Filter,  Stage::BuildDocs,
                                                     Stage::TrainBaseline, Stage::Predict, Stage::ImportPreds,
                                                     Stage::Eval,        Stage::Aggregate, Stage::Cluster,
                                                     Stage::Report};

std::string_view name_of(Stage s);
std::optional<Stage> parse_stage(std::string_view name);

struct RunOptions {
  bool force = false;
  bool strict = false;
};

struct StageOutcome {
  Stage stage = Stage::Ingest;
  bool skipped = false;
  io::json counts = io::json::object();
  std::vector<std::string> messages;
};

/// Runs one stage, writing its outputs atomically under `config.out_dir` and
/// recording digests and counts in `manifest.json`. A stage whose inputs,
/// parameters and outputs all match the manifest is skipped unless forced.
StageOutcome run_stage(Stage stage, const PipelineConfig& config, const RunOptions& options = {});

/// Every stage in order; import-preds only when a predictions file is configured.
std::vector<StageOutcome> run_all(const PipelineConfig& config, const RunOptions& options = {});

/// Recomputes every digest recorded in the manifest; returns mismatch descriptions.
std::vector<std::string> verify_manifest(const fs::path& out_dir);

/// Output files (relative to out_dir) whose bytes must be reproducible.
std::vector<std::string> deterministic_outputs();

}  // namespace abma::pipeline

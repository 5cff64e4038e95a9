#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "abma/io.hpp"

namespace abma::clusterkit {

/// Points are rows.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> column_ids;
  Matrix values;

  /// Throws DataError on shape mismatch, duplicate column ids or non-finite entries.
  void validate() const;
};

/// First column holds row ids; the header names the feature columns.
FeatureMatrix parse_feature_csv(std::string_view text);
std::string to_csv(const FeatureMatrix& m);

FeatureMatrix drop_columns(const FeatureMatrix& m, const std::vector<std::string>& names);

struct Selection {
  FeatureMatrix matrix;
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  /// Non-zero fraction of every input column, in input order.
  std::vector<double> densities;
};

/// Keeps columns whose non-zero fraction strictly exceeds `threshold`.
Selection select_dense_features(const FeatureMatrix& m, double threshold = 0.40);

struct Scaling {
  FeatureMatrix matrix;
  /// Per column (min, max) of log1p values before min-max scaling.
  std::vector<std::pair<double, double>> ranges;
};

/// log1p then min-max to [0, 1] per column; constant columns become zeros.
Scaling scale(const FeatureMatrix& m);

struct TsneConfig {
  int output_dims = 2;
  double perplexity = 10.0;
  double learning_rate = 200.0;
  int iterations = 1000;
  std::uint64_t seed = 42;
  double early_exaggeration = 12.0;
  int early_exaggeration_iters = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iter = 250;
  double min_gain = 0.01;
  double init_stddev = 1e-4;

  io::json to_json() const;
};

/// Symmetrised joint probabilities P = (P_{j|i} + P_{i|j}) / 2n, with each
/// conditional row's Gaussian bandwidth binary-searched to match `perplexity`.
/// Optionally reports the achieved per-row perplexities.
Matrix joint_probabilities(const Matrix& x, double perplexity, std::vector<double>* row_perplexity = nullptr);

/// KL(P || Q) for Student-t (one degree of freedom) affinities Q of `y`.
double kl_divergence(const Matrix& p, const Matrix& y);
/// Analytic gradient of kl_divergence with respect to `y`.
Matrix kl_gradient(const Matrix& p, const Matrix& y);

struct TsneResult {
  Matrix embedding;
  std::vector<double> row_perplexity;
  double kl_after_exaggeration = 0.0;
  double kl_final = 0.0;
};

/// Exact O(n^2) t-SNE with momentum, per-parameter gains and early exaggeration.
TsneResult tsne(const Matrix& x, const TsneConfig& config = {});

struct ClusterResult {
  int k = 0;
  std::vector<int> assignments;
  Matrix centroids;
  double inertia = 0.0;
  std::optional<double> silhouette;
  /// Inertia after every completed Lloyd iteration.
  std::vector<double> inertia_history;
  int iterations = 0;
};

/// Nearest-centroid labels (ties go to the lower index).
std::vector<int> assign_nearest(const Matrix& points, const Matrix& centroids);

/// k-means++ seeding followed by Lloyd iterations until the assignment is a
/// fixpoint or `max_iterations` is reached. Empty clusters take the point
/// farthest from its centroid.
ClusterResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iterations = 300);

/// Mean silhouette coefficient; points in singleton clusters score 0.
double silhouette(const Matrix& points, const std::vector<int>& assignments);

struct SweepResult {
  std::vector<int> ks;
  std::vector<double> scores;
  std::vector<ClusterResult> results;
  std::vector<int> peaks;
  int best_k = 0;
};

/// One k-means run per k (seeded with seed + k) and the silhouette curve.
/// Peaks are local maxima; best_k is the first global maximum.
SweepResult sweep_k(const Matrix& points, int k_min, int k_max, std::uint64_t seed);

std::vector<int> local_maxima(const std::vector<int>& ks, const std::vector<double>& scores);

struct ClusterProfile {
  std::vector<std::string> features;
  std::vector<std::vector<std::string>> members;
  /// k x features, means of the raw (unscaled) values.
  Matrix means;
};

ClusterProfile profile_clusters(const FeatureMatrix& raw, const std::vector<int>& assignments, int k);

io::json radar_json(const ClusterProfile& profile);

std::string scatter_svg(const Matrix& embedding, const std::vector<std::string>& ids, const std::vector<int>& assignments,
                        std::string_view stamp);
std::string radar_svg(const ClusterProfile& profile, std::string_view stamp);

}  // namespace abma::clusterkit

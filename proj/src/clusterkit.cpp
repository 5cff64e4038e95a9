#include "abma/clusterkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "abma/error.hpp"
#include "abma/random.hpp"

namespace abma::clusterkit {

namespace {

double parse_number(std::string_view s, std::size_t line) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw DataError("line " + std::to_string(line) + ": not a number: '" + std::string(s) + "'");
  return v;
}

/// Squared Euclidean distances between all rows.
Matrix squared_distances(const Matrix& x) {
  const auto n = x.rows();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = (x.row(i) - x.row(j)).squaredNorm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

double distance(const Matrix& points, Eigen::Index i, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    double diff = points(i, c) - points(j, c);
    s += diff * diff;
  }
  return std::sqrt(s);
}

/// Student-t kernel matrix (zero diagonal) and its total.
std::pair<Matrix, double> student_kernel(const Matrix& y) {
  const auto n = y.rows();
  Matrix num(n, n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    num(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
      num(i, j) = v;
      num(j, i) = v;
      total += 2.0 * v;
    }
  }
  return {num, total};
}

Matrix gradient_from_kernel(const Matrix& p, const Matrix& y, const Matrix& num, double total) {
  const auto n = y.rows();
  Matrix grad = Matrix::Zero(n, y.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      double coeff = (p(i, j) - num(i, j) / total) * num(i, j);
      grad.row(i) += coeff * (y.row(i) - y.row(j));
    }
  }
  return 4.0 * grad;
}

double squared_distance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

}  // namespace

void FeatureMatrix::validate() const {
  if (values.rows() != static_cast<Eigen::Index>(row_ids.size()) ||
      values.cols() != static_cast<Eigen::Index>(column_ids.size()))
    throw DataError("feature matrix shape does not match its row/column ids");
  std::set<std::string> cols(column_ids.begin(), column_ids.end());
  if (cols.size() != column_ids.size()) throw DataError("feature matrix has duplicate column ids");
  if (!values.allFinite()) throw DataError("feature matrix has missing or non-finite entries");
}

FeatureMatrix parse_feature_csv(std::string_view text) {
  auto rows = io::parse_csv(text);
  if (rows.empty()) throw DataError("feature CSV is empty");
  FeatureMatrix m;
  m.column_ids.assign(rows[0].fields.begin() + 1, rows[0].fields.end());
  m.values.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(m.column_ids.size()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != m.column_ids.size() + 1)
      throw DataError("line " + std::to_string(rows[r].line) + ": expected " +
                      std::to_string(m.column_ids.size() + 1) + " fields");
    m.row_ids.push_back(f[0]);
    for (std::size_t c = 1; c < f.size(); ++c)
      m.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) = parse_number(f[c], rows[r].line);
  }
  m.validate();
  return m;
}

std::string to_csv(const FeatureMatrix& m) {
  std::vector<std::string> header{"ticker"};
  header.insert(header.end(), m.column_ids.begin(), m.column_ids.end());
  std::string out = io::csv_line(header);
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    std::vector<std::string> fields{m.row_ids[static_cast<std::size_t>(i)]};
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) fields.push_back(io::format_double(m.values(i, j)));
    out += io::csv_line(fields);
  }
  return out;
}

FeatureMatrix drop_columns(const FeatureMatrix& m, const std::vector<std::string>& names) {
  std::vector<Eigen::Index> keep;
  FeatureMatrix out;
  out.row_ids = m.row_ids;
  for (std::size_t c = 0; c < m.column_ids.size(); ++c) {
    if (std::find(names.begin(), names.end(), m.column_ids[c]) != names.end()) continue;
    keep.push_back(static_cast<Eigen::Index>(c));
    out.column_ids.push_back(m.column_ids[c]);
  }
  out.values.resize(m.values.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.values.col(static_cast<Eigen::Index>(k)) = m.values.col(keep[k]);
  return out;
}

Selection select_dense_features(const FeatureMatrix& m, double threshold) {
  m.validate();
  if (m.values.rows() == 0 || m.values.cols() == 0) throw DataError("cannot select features of an empty matrix");
  Selection sel;
  std::vector<std::string> to_drop;
  const auto rows = static_cast<double>(m.values.rows());
  for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
    double nonzero = 0.0;
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) nonzero += m.values(r, c) != 0.0;
    double density = nonzero / rows;
    sel.densities.push_back(density);
    const auto& name = m.column_ids[static_cast<std::size_t>(c)];
    if (density > threshold) {
      sel.kept.push_back(name);
    } else {
      sel.dropped.push_back(name);
      to_drop.push_back(name);
    }
  }
  if (sel.kept.empty()) {
    std::string msg = "no column is denser than " + io::format_double(threshold) + ":";
    for (std::size_t c = 0; c < m.column_ids.size(); ++c)
      msg += " " + m.column_ids[c] + "=" + io::format_double(sel.densities[c]);
    throw DataError(msg);
  }
  sel.matrix = drop_columns(m, to_drop);
  return sel;
}

Scaling scale(const FeatureMatrix& m) {
  m.validate();
  if ((m.values.array() < 0.0).any()) throw DataError("scale requires non-negative values");
  Scaling s;
  s.matrix = m;
  auto& v = s.matrix.values;
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    for (Eigen::Index r = 0; r < v.rows(); ++r) v(r, c) = std::log1p(v(r, c));
    double lo = v.rows() ? v.col(c).minCoeff() : 0.0;
    double hi = v.rows() ? v.col(c).maxCoeff() : 0.0;
    s.ranges.emplace_back(lo, hi);
    for (Eigen::Index r = 0; r < v.rows(); ++r) v(r, c) = hi > lo ? (v(r, c) - lo) / (hi - lo) : 0.0;
  }
  return s;
}

io::json TsneConfig::to_json() const {
  return {{"output_dims", output_dims},
          {"perplexity", perplexity},
          {"learning_rate", learning_rate},
          {"iterations", iterations},
          {"seed", seed},
          {"early_exaggeration", early_exaggeration},
          {"early_exaggeration_iters", early_exaggeration_iters},
          {"initial_momentum", initial_momentum},
          {"final_momentum", final_momentum},
          {"momentum_switch_iter", momentum_switch_iter},
          {"min_gain", min_gain},
          {"init_stddev", init_stddev}};
}

Matrix joint_probabilities(const Matrix& x, double perplexity, std::vector<double>* row_perplexity) {
  const auto n = x.rows();
  if (n < 2) throw NumericError("need at least two points for joint probabilities");
  const Matrix d = squared_distances(x);
  const double target = std::log(perplexity);
  Matrix cond = Matrix::Zero(n, n);
  if (row_perplexity) row_perplexity->assign(static_cast<std::size_t>(n), 0.0);

  std::vector<double> row(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      dmin = std::min(dmin, d(i, j));
      dmax = std::max(dmax, d(i, j));
    }
    if (!(dmax > dmin))
      throw NumericError("degenerate distances: all neighbours of row " + std::to_string(i) +
                         " are equidistant, so no bandwidth reaches perplexity " + io::format_double(perplexity));

    // Distances are shifted by their minimum; entropy is shift invariant and
    // the shift keeps exp() away from underflow.
    double beta = 1.0 / (dmax - dmin);
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
      double sum = 0.0;
      double weighted = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) {
          row[static_cast<std::size_t>(j)] = 0.0;
          continue;
        }
        double shifted = d(i, j) - dmin;
        double p = std::exp(-beta * shifted);
        row[static_cast<std::size_t>(j)] = p;
        sum += p;
        weighted += shifted * p;
      }
      entropy = std::log(sum) + beta * weighted / sum;
      for (Eigen::Index j = 0; j < n; ++j) cond(i, j) = row[static_cast<std::size_t>(j)] / sum;
      double diff = entropy - target;
      if (std::abs(diff) < 1e-10) {
        converged = true;
        break;
      }
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
      if (!(beta > 1e-300 && beta < 1e300))
        throw NumericError("degenerate distances: bandwidth search for row " + std::to_string(i) +
                           " hit its variance bounds");
    }
    if (!converged && std::abs(entropy - target) > 1e-6)
      throw NumericError("bandwidth search for row " + std::to_string(i) + " did not converge");
    if (row_perplexity) (*row_perplexity)[static_cast<std::size_t>(i)] = std::exp(entropy);
  }
  Matrix p = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
  return p;
}

double kl_divergence(const Matrix& p, const Matrix& y) {
  auto [num, total] = student_kernel(y);
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      if (i != j && p(i, j) > 0.0) kl += p(i, j) * std::log(p(i, j) / (num(i, j) / total));
  return kl;
}

Matrix kl_gradient(const Matrix& p, const Matrix& y) {
  auto [num, total] = student_kernel(y);
  return gradient_from_kernel(p, y, num, total);
}

TsneResult tsne(const Matrix& x, const TsneConfig& config) {
  const auto n = x.rows();
  if (n < 4) throw NumericError("t-SNE needs at least 4 rows, got " + std::to_string(n));
  if (config.iterations < config.early_exaggeration_iters)
    throw UsageError("t-SNE iterations must be at least the early exaggeration length");
  if (config.output_dims < 1) throw UsageError("t-SNE output_dims must be positive");
  {
    // Fail on coincident data before the perplexity bound so the cause is clear.
    const Matrix d = squared_distances(x);
    for (Eigen::Index i = 0; i < n; ++i) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) lo = std::min(lo, d(i, j)), hi = std::max(hi, d(i, j));
      if (!(hi > lo))
        throw NumericError("degenerate distances: all neighbours of row " + std::to_string(i) +
                           " are equidistant; bandwidth search would hit its variance bounds");
    }
  }
  const double bound = static_cast<double>(n - 1) / 3.0;
  if (!(config.perplexity > 0.0 && config.perplexity < bound))
    throw NumericError("perplexity " + io::format_double(config.perplexity) + " is infeasible for " +
                       std::to_string(n) + " rows; it must be below (n - 1) / 3 = " + io::format_double(bound));

  TsneResult result;
  const Matrix p = joint_probabilities(x, config.perplexity, &result.row_perplexity);

  Rng rng(config.seed);
  Matrix y(n, config.output_dims);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < y.cols(); ++c) y(i, c) = config.init_stddev * rng.normal();

  Matrix update = Matrix::Zero(n, y.cols());
  Matrix gains = Matrix::Ones(n, y.cols());
  for (int iter = 0; iter < config.iterations; ++iter) {
    const bool exaggerate = iter < config.early_exaggeration_iters;
    const double momentum = iter < config.momentum_switch_iter ? config.initial_momentum : config.final_momentum;
    auto [num, total] = student_kernel(y);
    const Matrix grad = gradient_from_kernel(exaggerate ? Matrix(p * config.early_exaggeration) : p, y, num, total);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        double& g = gains(i, c);
        g = ((grad(i, c) > 0.0) != (update(i, c) > 0.0)) ? g + 0.2 : g * 0.8;
        g = std::max(g, config.min_gain);
        update(i, c) = momentum * update(i, c) - config.learning_rate * g * grad(i, c);
      }
    }
    y += update;
    y.rowwise() -= y.colwise().mean();
    if (!y.allFinite()) throw NumericError("t-SNE produced non-finite values at iteration " + std::to_string(iter + 1));
    if (iter + 1 == config.early_exaggeration_iters) result.kl_after_exaggeration = kl_divergence(p, y);
  }
  if (config.early_exaggeration_iters == 0) result.kl_after_exaggeration = kl_divergence(p, Matrix(y));
  result.kl_final = kl_divergence(p, y);
  result.embedding = std::move(y);
  return result;
}

std::vector<int> assign_nearest(const Matrix& points, const Matrix& centroids) {
  std::vector<int> out(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = squared_distance(points, i, centroids, 0);
    for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
      double d = squared_distance(points, i, centroids, c);
      if (d < best_d) best_d = d, best = static_cast<int>(c);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

ClusterResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iterations) {
  const auto n = points.rows();
  if (k < 1) throw UsageError("k must be positive");
  if (k > n) throw DataError("k = " + std::to_string(k) + " exceeds the number of points (" + std::to_string(n) + ")");

  Rng rng(seed);
  Matrix centroids(k, points.cols());
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  Eigen::Index first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centroids.row(0) = points.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& d = nearest[static_cast<std::size_t>(i)];
      d = std::min(d, squared_distance(points, i, centroids, c - 1));
      total += d;
    }
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += nearest[static_cast<std::size_t>(i)];
        if (acc > target && nearest[static_cast<std::size_t>(i)] > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = points.row(chosen);
  }

  ClusterResult result;
  result.k = k;
  std::vector<int> previous;
  for (int iter = 0; iter < max_iterations; ++iter) {
    auto assign = assign_nearest(points, centroids);

    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int a : assign) ++sizes[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        int a = assign[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(a)] < 2) continue;
        double d = squared_distance(points, i, centroids, a);
        if (d > far_d) far_d = d, far = i;
      }
      --sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
      assign[static_cast<std::size_t>(far)] = c;
      sizes[static_cast<std::size_t>(c)] = 1;
      centroids.row(c) = points.row(far);
    }

    if (assign == previous) break;

    centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centroids.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c) centroids.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);

    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) inertia += squared_distance(points, i, centroids, assign[static_cast<std::size_t>(i)]);
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;
    previous = std::move(assign);
  }
  result.assignments = std::move(previous);
  result.centroids = std::move(centroids);
  result.inertia = result.inertia_history.empty() ? 0.0 : result.inertia_history.back();
  return result;
}

double silhouette(const Matrix& points, const std::vector<int>& assignments) {
  const auto n = points.rows();
  if (static_cast<std::size_t>(n) != assignments.size()) throw DataError("silhouette: assignment count mismatch");
  int k = 0;
  for (int a : assignments) {
    if (a < 0) throw DataError("silhouette: negative cluster label");
    k = std::max(k, a + 1);
  }
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
  if (k < 2) throw DataError("silhouette is undefined for a single cluster");
  for (int c = 0; c < k; ++c)
    if (sizes[static_cast<std::size_t>(c)] == 0) throw DataError("silhouette: cluster " + std::to_string(c) + " is empty");

  double total = 0.0;
  std::vector<double> sums(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto own = static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)]);
    if (sizes[own] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[static_cast<std::size_t>(assignments[static_cast<std::size_t>(j)])] += distance(points, i, j);
    }
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c)
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

std::vector<int> local_maxima(const std::vector<int>& ks, const std::vector<double>& scores) {
  std::vector<int> peaks;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool left = i == 0 || scores[i] > scores[i - 1];
    bool right = i + 1 == scores.size() || scores[i] >= scores[i + 1];
    if (left && right) peaks.push_back(ks[i]);
  }
  return peaks;
}

SweepResult sweep_k(const Matrix& points, int k_min, int k_max, std::uint64_t seed) {
  if (k_min < 2 || k_max < k_min) throw UsageError("k range must satisfy 2 <= min <= max");
  if (k_max > points.rows())
    throw DataError("k range maximum " + std::to_string(k_max) + " exceeds the number of points (" +
                    std::to_string(points.rows()) + ")");
  SweepResult sweep;
  for (int k = k_min; k <= k_max; ++k) {
    auto r = kmeans(points, k, seed + static_cast<std::uint64_t>(k));
    r.silhouette = silhouette(points, r.assignments);
    sweep.ks.push_back(k);
    sweep.scores.push_back(*r.silhouette);
    sweep.results.push_back(std::move(r));
  }
  sweep.peaks = local_maxima(sweep.ks, sweep.scores);
  auto best = std::max_element(sweep.scores.begin(), sweep.scores.end());
  sweep.best_k = sweep.ks[static_cast<std::size_t>(best - sweep.scores.begin())];
  return sweep;
}

ClusterProfile profile_clusters(const FeatureMatrix& raw, const std::vector<int>& assignments, int k) {
  if (assignments.size() != raw.row_ids.size() || raw.values.rows() != static_cast<Eigen::Index>(assignments.size()))
    throw DataError("profile_clusters: " + std::to_string(assignments.size()) + " assignments for " +
                    std::to_string(raw.row_ids.size()) + " matrix rows");
  ClusterProfile profile;
  profile.features = raw.column_ids;
  profile.members.resize(static_cast<std::size_t>(k));
  profile.means = Matrix::Zero(k, raw.values.cols());
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    int a = assignments[i];
    if (a < 0 || a >= k) throw DataError("profile_clusters: cluster label out of range");
    profile.members[static_cast<std::size_t>(a)].push_back(raw.row_ids[i]);
    profile.means.row(a) += raw.values.row(static_cast<Eigen::Index>(i));
  }
  for (int c = 0; c < k; ++c) {
    auto size = profile.members[static_cast<std::size_t>(c)].size();
    if (size > 0) profile.means.row(c) /= static_cast<double>(size);
  }
  return profile;
}

io::json radar_json(const ClusterProfile& profile) {
  io::json series = io::json::array();
  for (Eigen::Index c = 0; c < profile.means.rows(); ++c) {
    std::vector<double> values(profile.means.row(c).begin(), profile.means.row(c).end());
    const auto& members = profile.members[static_cast<std::size_t>(c)];
    series.push_back({{"cluster", c}, {"size", members.size()}, {"members", members}, {"values", values}});
  }
  return {{"features", profile.features}, {"series", series}};
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
                                    "#8c6d31", "#843c39", "#7b4173"};

std::string colour(int c) { return kPalette[static_cast<std::size_t>(c) % std::size(kPalette)]; }

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string scatter_svg(const Matrix& embedding, const std::vector<std::string>& ids, const std::vector<int>& assignments,
                        std::string_view stamp) {
  const double size = 600.0, pad = 30.0;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (embedding.rows() > 0) {
    xmin = embedding.col(0).minCoeff(), xmax = embedding.col(0).maxCoeff();
    ymin = embedding.col(1).minCoeff(), ymax = embedding.col(1).maxCoeff();
  }
  auto sx = [&](double v) { return pad + (xmax > xmin ? (v - xmin) / (xmax - xmin) : 0.5) * (size - 2 * pad); };
  auto sy = [&](double v) { return size - pad - (ymax > ymin ? (v - ymin) / (ymax - ymin) : 0.5) * (size - 2 * pad); };
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\">\n";
  out += "<!-- generated " + std::string(stamp) + " -->\n";
  out += "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
    int c = assignments[static_cast<std::size_t>(i)];
    out += "<circle cx=\"" + fixed(sx(embedding(i, 0))) + "\" cy=\"" + fixed(sy(embedding(i, 1))) +
           "\" r=\"4\" fill=\"" + colour(c) + "\"><title>" + escape_xml(ids[static_cast<std::size_t>(i)]) +
           " (cluster " + std::to_string(c) + ")</title></circle>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string radar_svg(const ClusterProfile& profile, std::string_view stamp) {
  const double cx = 300.0, cy = 300.0, radius = 220.0;
  const auto f = profile.features.size();
  double top = profile.means.size() ? profile.means.maxCoeff() : 0.0;
  if (!(top > 0.0)) top = 1.0;
  auto point = [&](std::size_t axis, double value) {
    double angle = 2.0 * 3.14159265358979323846 * static_cast<double>(axis) / static_cast<double>(f) - 1.5707963267948966;
    double r = radius * value / top;
    return fixed(cx + r * std::cos(angle)) + "," + fixed(cy + r * std::sin(angle));
  };
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\">\n";
  out += "<!-- generated " + std::string(stamp) + " -->\n";
  out += "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  for (std::size_t a = 0; a < f; ++a) {
    out += "<line x1=\"300\" y1=\"300\" x2=\"" + point(a, top).substr(0, point(a, top).find(',')) + "\" y2=\"" +
           point(a, top).substr(point(a, top).find(',') + 1) + "\" stroke=\"#ccc\"/>\n";
    auto label = point(a, top * 1.08);
    out += "<text x=\"" + label.substr(0, label.find(',')) + "\" y=\"" + label.substr(label.find(',') + 1) +
           "\" font-size=\"10\" text-anchor=\"middle\">" + escape_xml(profile.features[a]) + "</text>\n";
  }
  for (Eigen::Index c = 0; c < profile.means.rows(); ++c) {
    std::string pts;
    for (std::size_t a = 0; a < f; ++a) pts += (a ? " " : "") + point(a, profile.means(c, static_cast<Eigen::Index>(a)));
    out += "<polygon points=\"" + pts + "\" fill=\"none\" stroke=\"" + colour(static_cast<int>(c)) +
           "\" stroke-width=\"1.5\"><title>cluster " + std::to_string(c) + "</title></polygon>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace abma::clusterkit

#pragma once
// Random inputs for property tests.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "abma/clusterkit.hpp"
#include "abma/random.hpp"
#include "oracles.hpp"

namespace gen {

/// Sentences built from lexicon fragments with random case, whitespace runs,
/// glued letters/digits and punctuation, so boundaries get exercised.
inline std::vector<std::string> lexicon_sentences(abma::Rng& rng, const std::vector<oracle::Term>& terms, std::size_t n) {
  static const std::vector<std::string> words = {"the", "we", "revenue", "grew", "and", "our", "in", "quarter",
                                                 "retail", "said", "ai", "Ai", "AI", "iot", "IOT", "IoT", "3D",
                                                 "printing", "products", "app", "apps", "cloudy", "x1", "of"};
  static const std::vector<std::string> seps = {" ", " ", " ", "  ", "\t", "\n ", ", ", ". ", "-", "/", "(", ")", "'s "};
  auto mutate = [&](std::string s) {
    for (auto& c : s) {
      double u = rng.uniform();
      if (u < 0.15 && c >= 'a' && c <= 'z') c = char(c - 32);
      else if (u < 0.25 && c >= 'A' && c <= 'Z') c = char(c + 32);
      else if (u < 0.30 && c == ' ') c = '\t';
    }
    if (rng.uniform() < 0.2) s.insert(0, std::string(1, char('a' + rng.below(26))));
    if (rng.uniform() < 0.25) s += std::string(rng.below(3) + 1, char('a' + rng.below(26)));
    if (rng.uniform() < 0.05) s += "7";
    return s;
  };
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    auto parts = 3 + rng.below(10);
    for (std::uint64_t p = 0; p < parts; ++p) {
      if (p) s += seps[rng.below(seps.size())];
      if (rng.uniform() < 0.35) {
        auto body = terms[rng.below(terms.size())].body;
        s += rng.uniform() < 0.6 ? mutate(body) : body;
      } else {
        s += words[rng.below(words.size())];
      }
    }
    if (rng.uniform() < 0.7) s += ".";
    out.push_back(std::move(s));
  }
  return out;
}

/// Isotropic Gaussian blobs around the given centres; labels follow the centre order.
inline abma::clusterkit::Matrix blobs(abma::Rng& rng, const std::vector<std::vector<double>>& centres, int per_blob,
                                      double spread, std::vector<int>* labels = nullptr) {
  const auto dims = static_cast<Eigen::Index>(centres.front().size());
  abma::clusterkit::Matrix x(static_cast<Eigen::Index>(centres.size()) * per_blob, dims);
  Eigen::Index r = 0;
  for (std::size_t c = 0; c < centres.size(); ++c)
    for (int i = 0; i < per_blob; ++i, ++r) {
      for (Eigen::Index d = 0; d < dims; ++d) x(r, d) = centres[c][std::size_t(d)] + spread * rng.normal();
      if (labels) labels->push_back(int(c));
    }
  return x;
}

/// True when the two labelings induce the same partition.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [it, fresh] = ab.emplace(a[i], b[i]);
    auto [jt, fresh2] = ba.emplace(b[i], a[i]);
    if (it->second != b[i] || jt->second != a[i]) return false;
  }
  return true;
}

/// Step size for tiny inputs: n / exaggeration / 4, floored at 50.
inline double small_sample_learning_rate(Eigen::Index n, double exaggeration) {
  return std::max(static_cast<double>(n) / exaggeration / 4.0, 50.0);
}

/// Smallest distance between points of different blobs exceeds the largest
/// distance between points of the same blob.
inline bool blobs_separated(const abma::clusterkit::Matrix& y, const std::vector<int>& labels) {
  double within = 0, across = INFINITY;
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) {
      double d = (y.row(i) - y.row(j)).norm();
      if (labels[std::size_t(i)] == labels[std::size_t(j)]) within = std::max(within, d);
      else across = std::min(across, d);
    }
  return across > within;
}

}  // namespace gen

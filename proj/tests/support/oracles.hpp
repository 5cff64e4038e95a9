#pragma once
// Brute-force reference implementations used as test oracles. They share no
// code with the library beyond the public value types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "abma/classify.hpp"
#include "abma/clusterkit.hpp"
#include "abma/io.hpp"
#include "abma/labels.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// lexicon: per-term scan straight over the raw text

struct Term {
  std::string topic;
  std::string body;  // whitespace collapsed, lowercased unless exact
  bool exact = false;
  bool suffix = false;
  std::string key() const { return topic + "|" + (exact ? "=" : "") + body + (suffix ? "*" : ""); }
};

inline bool word(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }
inline bool space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
inline char lower(char c) { return (c >= 'A' && c <= 'Z') ? char(c + 32) : c; }

inline Term make_term(std::string topic, std::string raw, bool exact) {
  Term t{std::move(topic), {}, exact, false};
  std::string s;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw.compare(i, 2, "\\b") == 0) {
      ++i;
      continue;
    }
    s.push_back(raw[i]);
  }
  if (s.size() >= 6 && s.compare(s.size() - 6, 6, "[a-z]*") == 0) {
    s.resize(s.size() - 6);
    t.suffix = true;
  } else if (!s.empty() && s.back() == '*') {
    s.pop_back();
    t.suffix = true;
  }
  bool gap = false;
  for (char c : s) {
    if (space(c)) {
      gap = !t.body.empty();
      continue;
    }
    if (gap) t.body.push_back(' ');
    gap = false;
    t.body.push_back(exact ? c : lower(c));
  }
  return t;
}

inline std::vector<Term> read_terms(std::string_view csv) {
  auto rows = abma::io::parse_csv(csv);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].fields.size(); ++i) col[rows[0].fields[i]] = i;
  std::vector<Term> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    auto get = [&](const char* name) { return col.count(name) && col[name] < f.size() ? f[col[name]] : std::string(); };
    auto cs = get("case_sensitive");
    out.push_back(make_term(get("topic"), get("term"), cs == "true" || cs == "1" || cs == "yes"));
  }
  return out;
}

/// (term key, start, end) for every occurrence; duplicate terms collapse.
using Match = std::tuple<std::string, std::size_t, std::size_t>;

inline std::set<Match> scan(const std::vector<Term>& terms, std::string_view text) {
  std::set<Match> out;
  const std::size_t n = text.size();
  for (const auto& t : terms) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && word(text[i - 1]) && word(text[i])) continue;
      std::size_t p = i;
      bool ok = true;
      for (char c : t.body) {
        if (c == ' ') {
          if (p >= n || !space(text[p])) {
            ok = false;
            break;
          }
          while (p < n && space(text[p])) ++p;
        } else {
          if (p >= n || (t.exact ? text[p] : lower(text[p])) != c) {
            ok = false;
            break;
          }
          ++p;
        }
      }
      if (!ok) continue;
      if (t.suffix)
        while (p < n && ((text[p] >= 'a' && text[p] <= 'z') || (!t.exact && text[p] >= 'A' && text[p] <= 'Z'))) ++p;
      if (p < n && word(text[p - 1]) && word(text[p])) continue;
      out.insert({t.key(), i, p});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// context windows: membership by direct interval test, no merging logic

inline std::vector<std::vector<std::size_t>> windows(std::size_t n, const std::vector<std::size_t>& hits,
                                                     std::size_t w) {
  if (w == 0) {
    std::set<std::size_t> uniq(hits.begin(), hits.end());
    std::vector<std::vector<std::size_t>> runs;
    for (auto h : uniq) runs.push_back({h});
    return runs;
  }
  std::vector<bool> covered(n, false);
  for (auto h : hits)
    for (std::size_t i = (h > w ? h - w : 0); i <= std::min(n - 1, h + w); ++i) covered[i] = true;
  std::vector<std::vector<std::size_t>> runs;
  for (std::size_t i = 0; i < n; ++i) {
    if (!covered[i]) continue;
    if (i == 0 || !covered[i - 1]) runs.emplace_back();
    runs.back().push_back(i);
  }
  return runs;
}

// ---------------------------------------------------------------------------
// metrics: explicit confusion counts per label

struct Prf {
  double p = 0, r = 0, f = 0;
};

inline Prf prf(double tp, double fp, double fn) {
  Prf m;
  m.p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f = m.p + m.r > 0 ? 2 * m.p * m.r / (m.p + m.r) : 0.0;
  return m;
}

struct Weighted {
  Prf aspect, maturity;
};

/// Support-weighted P/R/F1 for both tasks. Missing predictions are
/// all-negative for aspects and never correct for maturity.
inline Weighted weighted_metrics(const std::vector<abma::classify::Prediction>& preds,
                                 const std::vector<abma::classify::LabeledExample>& gold) {
  std::map<std::string, const abma::classify::Prediction*> by_id;
  for (const auto& p : preds) by_id[p.doc_id] = &p;
  Weighted out;
  double total = 0;
  for (std::size_t a = 0; a < abma::kAspectCount; ++a) {
    double tp = 0, fp = 0, fn = 0;
    for (const auto& g : gold) {
      bool truth = g.aspects.count(abma::aspect_at(a)) > 0;
      bool guess = false;
      if (auto it = by_id.find(g.doc_id); it != by_id.end())
        for (const auto& [asp, s] : it->second->aspects) guess |= asp == abma::aspect_at(a);
      tp += truth && guess;
      fp += !truth && guess;
      fn += truth && !guess;
    }
    double support = tp + fn;
    auto m = prf(tp, fp, fn);
    out.aspect.p += support * m.p;
    out.aspect.r += support * m.r;
    out.aspect.f += support * m.f;
    total += support;
  }
  if (total > 0) {
    out.aspect.p /= total;
    out.aspect.r /= total;
    out.aspect.f /= total;
  }
  total = 0;
  for (std::size_t k = 0; k < abma::kMaturityCount; ++k) {
    double tp = 0, fp = 0, fn = 0;
    for (const auto& g : gold) {
      if (!g.maturity) continue;
      bool truth = abma::index_of(*g.maturity) == k;
      auto it = by_id.find(g.doc_id);
      bool guess = it != by_id.end() && abma::index_of(it->second->maturity()) == k;
      tp += truth && guess;
      fp += !truth && guess;
      fn += truth && !guess;
    }
    double support = tp + fn;
    auto m = prf(tp, fp, fn);
    out.maturity.p += support * m.p;
    out.maturity.r += support * m.r;
    out.maturity.f += support * m.f;
    total += support;
  }
  if (total > 0) {
    out.maturity.p /= total;
    out.maturity.r /= total;
    out.maturity.f /= total;
  }
  return out;
}

// ---------------------------------------------------------------------------
// checklist aggregation by enumeration

/// Score for one (company, aspect): average over the window years of the sum
/// of distinct classes seen that year.
inline double checklist(const std::vector<std::pair<int, int>>& year_and_level, int first, int last) {
  double sum = 0;
  for (int y = first; y <= last; ++y) {
    int score = 0;
    for (int level = 1; level <= 4; ++level) {
      bool seen = false;
      for (const auto& [yy, l] : year_and_level) seen |= (yy == y && l == level);
      if (seen) score += level;
    }
    sum += score;
  }
  return sum / (last - first + 1);
}

// ---------------------------------------------------------------------------
// silhouette straight from the definition

inline double silhouette(const abma::clusterkit::Matrix& x, const std::vector<int>& label) {
  const std::size_t n = label.size();
  int k = 0;
  for (int l : label) k = std::max(k, l + 1);
  std::vector<std::size_t> size(static_cast<std::size_t>(k), 0);
  for (int l : label) ++size[static_cast<std::size_t>(l)];
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (size[static_cast<std::size_t>(label[i])] <= 1) continue;
    std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d2 = 0;
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        double d = x(Eigen::Index(i), c) - x(Eigen::Index(j), c);
        d2 += d * d;
      }
      sum[static_cast<std::size_t>(label[j])] += std::sqrt(d2);
    }
    const auto own = static_cast<std::size_t>(label[i]);
    double a = sum[own] / double(size[own] - 1);
    double b = INFINITY;
    for (std::size_t c = 0; c < size.size(); ++c)
      if (c != own && size[c] > 0) b = std::min(b, sum[c] / double(size[c]));
    double m = std::max(a, b);
    total += m > 0 ? (b - a) / m : 0.0;
  }
  return total / double(n);
}

// ---------------------------------------------------------------------------
// central finite differences of a scalar function of a matrix

template <typename F>
abma::clusterkit::Matrix numeric_gradient(F&& f, abma::clusterkit::Matrix y, double h = 1e-6) {
  abma::clusterkit::Matrix g(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      const double keep = y(i, j);
      y(i, j) = keep + h;
      const double up = f(y);
      y(i, j) = keep - h;
      const double down = f(y);
      y(i, j) = keep;
      g(i, j) = (up - down) / (2 * h);
    }
  return g;
}

}  // namespace oracle

#include "abma/aggregate.hpp"

#include <map>
#include <set>
#include <tuple>

#include "abma/error.hpp"

namespace abma::aggregate {

std::vector<AspectOccurrence> encode_occurrences(const std::vector<classify::Prediction>& predictions,
                                                 const std::vector<docbuild::Document>& documents) {
  std::map<std::string, const docbuild::Document*> docs;
  for (const auto& d : documents) docs[d.doc_id] = &d;
  std::vector<AspectOccurrence> out;
  for (const auto& p : predictions) {
    auto it = docs.find(p.doc_id);
    if (it == docs.end()) throw DataError("prediction for unknown document " + p.doc_id);
    const auto& doc = *it->second;
    auto date = corpus::parse_date(doc.call_date);
    if (!date) throw DataError("document " + doc.doc_id + " has invalid call_date " + doc.call_date);
    const int year = static_cast<int>(date->year());
    const auto maturity = p.maturity();
    for (const auto& [aspect, score] : p.aspects) out.push_back({doc.company, year, aspect, maturity});
  }
  return out;
}

int yearly_checklist_score(std::span<const Maturity> observed) {
  std::set<Maturity> distinct(observed.begin(), observed.end());
  int total = 0;
  for (auto m : distinct) total += value_of(m);
  return total;
}

std::vector<std::string> MaturityMatrix::feature_names() {
  std::vector<std::string> names(kAspectNames.begin(), kAspectNames.end());
  names.emplace_back("mean_maturity");
  return names;
}

MaturityMatrix company_matrix(const std::vector<AspectOccurrence>& occurrences, YearWindow window,
                              Denominator denominator) {
  if (window.last < window.first) throw UsageError("year window is empty");
  MaturityMatrix m;
  m.window = window;
  m.denominator = denominator;

  // company -> (aspect, year) -> distinct classes as a 4-bit mask
  std::map<std::string, std::map<std::pair<std::size_t, int>, unsigned>> seen;
  std::map<std::string, std::set<int>> active_years;
  for (const auto& o : occurrences) {
    if (o.year < window.first || o.year > window.last) {
      ++m.out_of_window;
      continue;
    }
    ++m.occurrences_used;
    seen[o.company][{index_of(o.aspect), o.year}] |= 1u << index_of(o.maturity);
    active_years[o.company].insert(o.year);
  }

  for (const auto& [company, cells] : seen) {
    std::array<double, kFeatureCount> row{};
    std::array<int, kAspectCount> sums{};
    for (const auto& [key, mask] : cells) {
      std::vector<Maturity> classes;
      for (std::size_t k = 0; k < kMaturityCount; ++k)
        if (mask & (1u << k)) classes.push_back(maturity_at(k));
      sums[key.first] += yearly_checklist_score(classes);
    }
    const double years = denominator == Denominator::Window ? window.length()
                                                            : static_cast<double>(active_years[company].size());
    double total = 0.0;
    for (std::size_t a = 0; a < kAspectCount; ++a) {
      row[a] = sums[a] / years;
      total += row[a];
    }
    row[kAspectCount] = total / static_cast<double>(kAspectCount);
    m.companies.push_back(company);
    m.rows.push_back(row);
  }
  return m;
}

std::string to_csv(const MaturityMatrix& m) {
  std::vector<std::string> header{"ticker"};
  for (auto& n : MaturityMatrix::feature_names()) header.push_back(n);
  std::string out = io::csv_line(header);
  for (std::size_t i = 0; i < m.companies.size(); ++i) {
    std::vector<std::string> fields{m.companies[i]};
    for (double v : m.rows[i]) fields.push_back(io::format_double(v));
    out += io::csv_line(fields);
  }
  return out;
}

io::json sidecar_json(const MaturityMatrix& m) {
  return {{"years_window", {m.window.first, m.window.last}},
          {"denominator", m.denominator == Denominator::Window ? "window" : "active"},
          {"mean_maturity", "unweighted mean of the 17 aspect scores"},
          {"companies", m.companies.size()},
          {"occurrences_used", m.occurrences_used},
          {"occurrences_out_of_window", m.out_of_window}};
}

}  // namespace abma::aggregate

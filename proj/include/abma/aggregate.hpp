#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "abma/classify.hpp"
#include "abma/docbuild.hpp"
#include "abma/io.hpp"
#include "abma/labels.hpp"

namespace abma::aggregate {

struct AspectOccurrence {
  std::string company;
  int year = 0;
  Aspect aspect = Aspect::DigitalProduct;
  Maturity maturity = Maturity::Plan;
  friend bool operator==(const AspectOccurrence&, const AspectOccurrence&) = default;
};

/// One occurrence per (document, predicted aspect), stamped with the
/// document's maturity. Documents with no predicted aspect contribute nothing.
std::vector<AspectOccurrence> encode_occurrences(const std::vector<classify::Prediction>& predictions,
                                                 const std::vector<docbuild::Document>& documents);

/// Sum of the distinct maturity classes observed (0..10).
int yearly_checklist_score(std::span<const Maturity> observed);

struct YearWindow {
  int first = 2015;
  int last = 2019;
  int length() const { return last - first + 1; }
};

enum class Denominator { Window, Active };

inline constexpr std::size_t kFeatureCount = kAspectCount + 1;

struct MaturityMatrix {
  std::vector<std::string> companies;
  std::vector<std::array<double, kFeatureCount>> rows;
  YearWindow window;
  Denominator denominator = Denominator::Window;
  std::size_t occurrences_used = 0;
  std::size_t out_of_window = 0;

  static std::vector<std::string> feature_names();
};

/// Aspect score = mean yearly checklist score over the window years (or over
/// the company's active years); column 18 is the plain mean of the 17 aspect
/// scores. Companies without in-window occurrences get no row.
MaturityMatrix company_matrix(const std::vector<AspectOccurrence>& occurrences, YearWindow window = {},
                              Denominator denominator = Denominator::Window);

std::string to_csv(const MaturityMatrix& m);
io::json sidecar_json(const MaturityMatrix& m);

}  // namespace abma::aggregate

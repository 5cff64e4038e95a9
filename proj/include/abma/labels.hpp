#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace abma {

/// The 17 digital-strategy aspects, in reporting order.
enum class Aspect : std::size_t {
  DigitalProduct,
  DigitalCustomerExperience,
  DigitalOperations,
  DigitalBusinessModel,
  Enablers,
  Practices,
  Ai,
  Analytics,
  Iot,
  Blockchain,
  Cloud,
  Mobile,
  Social,
  Robotics,
  Ar,
  Vr,
  Printing3d,
};

inline constexpr std::size_t kAspectCount = 17;

enum class AspectGroup { BusinessValue, StrategyManagement, DigitalTechnology };

inline constexpr std::array<std::string_view, kAspectCount> kAspectNames = {
    "digital_product", "digital_customer_experience", "digital_operations", "digital_business_model",
    "enablers",        "practices",                   "ai",                 "analytics",
    "iot",             "blockchain",                  "cloud",              "mobile",
    "social",          "robotics",                    "ar",                 "vr",
    "printing_3d"};

constexpr std::size_t index_of(Aspect a) { return static_cast<std::size_t>(a); }
constexpr Aspect aspect_at(std::size_t i) { return static_cast<Aspect>(i); }
constexpr std::string_view name_of(Aspect a) { return kAspectNames[index_of(a)]; }

constexpr AspectGroup group_of(Aspect a) {
  auto i = index_of(a);
  if (i < 4) return AspectGroup::BusinessValue;
  if (i < 6) return AspectGroup::StrategyManagement;
  return AspectGroup::DigitalTechnology;
}

constexpr std::optional<Aspect> parse_aspect(std::string_view name) {
  for (std::size_t i = 0; i < kAspectCount; ++i)
    if (kAspectNames[i] == name) return aspect_at(i);
  return std::nullopt;
}

/// Ordinal maturity; the numeric value is summed during aggregation.
enum class Maturity : int { Plan = 1, Pilot = 2, Release = 3, Pioneer = 4 };

inline constexpr std::size_t kMaturityCount = 4;
inline constexpr std::array<std::string_view, kMaturityCount> kMaturityNames = {"plan", "pilot", "release", "pioneer"};

constexpr int value_of(Maturity m) { return static_cast<int>(m); }
constexpr std::size_t index_of(Maturity m) { return static_cast<std::size_t>(value_of(m) - 1); }
constexpr Maturity maturity_at(std::size_t i) { return static_cast<Maturity>(static_cast<int>(i) + 1); }
constexpr std::string_view name_of(Maturity m) { return kMaturityNames[index_of(m)]; }

constexpr std::optional<Maturity> maturity_from_value(long long v) {
  if (v < 1 || v > 4) return std::nullopt;
  return static_cast<Maturity>(v);
}

constexpr std::optional<Maturity> parse_maturity(std::string_view name) {
  for (std::size_t i = 0; i < kMaturityCount; ++i)
    if (kMaturityNames[i] == name) return maturity_at(i);
  return std::nullopt;
}

}  // namespace abma

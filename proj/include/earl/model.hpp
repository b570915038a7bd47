#pragma once

// EARL domain model: annotations, scopes, vocabulary profiles and
// structural validation. Nothing here knows about XML.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "earl/detail/number.hpp"

namespace earl {

struct Unscoped {
  bool operator==(const Unscoped &) const = default;
};
struct InlineText {
  std::string text;
  bool operator==(const InlineText &) const = default;
};
struct Reference {
  std::string uri;
  bool operator==(const Reference &) const = default;
};
struct TimeSpan {
  double start = 0.0;
  double end = 0.0;
  bool operator==(const TimeSpan &) const = default;
};
struct ReferencedTimeSpan {
  std::string uri;
  double start = 0.0;
  double end = 0.0;
  bool operator==(const ReferencedTimeSpan &) const = default;
};

using Scope =
    std::variant<Unscoped, InlineText, Reference, TimeSpan, ReferencedTimeSpan>;

enum class Regulation { amplify, attenuate, simulate, suppress };

inline constexpr Regulation all_regulations[] = {
    Regulation::amplify, Regulation::attenuate, Regulation::simulate,
    Regulation::suppress};

constexpr std::string_view regulation_name(Regulation r) noexcept {
  switch (r) {
  case Regulation::amplify: return "amplify";
  case Regulation::attenuate: return "attenuate";
  case Regulation::simulate: return "simulate";
  case Regulation::suppress: return "suppress";
  }
  return "";
}

/// "hide" is accepted as a synonym of suppress.
inline std::optional<Regulation> regulation_from_name(std::string_view name) {
  for (Regulation r : all_regulations)
    if (regulation_name(r) == name)
      return r;
  if (name == "hide")
    return Regulation::suppress;
  return std::nullopt;
}

struct EmotionAnnotation {
  std::optional<std::string> category;
  std::map<std::string, double> dimensions;
  std::map<std::string, double> appraisals;
  std::optional<double> intensity;
  std::optional<double> probability;
  std::map<Regulation, double> regulation;
  std::optional<std::string> modality;
  Scope scope;

  bool has_descriptor() const noexcept {
    return category.has_value() || !dimensions.empty() || !appraisals.empty();
  }
  double effective_intensity() const noexcept { return intensity.value_or(1.0); }
  double effective_probability() const noexcept {
    return probability.value_or(1.0);
  }

  bool operator==(const EmotionAnnotation &) const = default;
};

struct ComplexEmotion {
  std::vector<EmotionAnnotation> constituents;
  Scope scope;

  bool operator==(const ComplexEmotion &) const = default;
};

using Item = std::variant<EmotionAnnotation, ComplexEmotion>;

inline const Scope &scope_of(const Item &item) {
  return std::visit([](const auto &x) -> const Scope & { return x.scope; },
                    item);
}

/// User-chosen label sets. In the default (permissive) mode an empty set
/// accepts any label; with `strict` an empty set accepts nothing.
struct VocabularyProfile {
  std::set<std::string> categories;
  std::set<std::string> dimension_names;
  std::set<std::string> appraisal_names;
  std::set<std::string> modalities;
  bool strict = false;

  static bool accepts_in(const std::set<std::string> &set,
                         const std::string &label, bool strict) {
    if (set.empty())
      return !strict;
    return set.contains(label);
  }
  bool accepts_category(const std::string &l) const {
    return accepts_in(categories, l, strict);
  }
  bool accepts_dimension(const std::string &l) const {
    return accepts_in(dimension_names, l, strict);
  }
  bool accepts_appraisal(const std::string &l) const {
    return accepts_in(appraisal_names, l, strict);
  }
  bool accepts_modality(const std::string &l) const {
    return accepts_in(modalities, l, strict);
  }

  /// Accepts everything; numeric attributes all become appraisals.
  static VocabularyProfile permissive() { return {}; }

  /// Permissive profile that knows the arousal/valence/power dimensions, so
  /// those attributes parse as dimensions and everything else as appraisals.
  static VocabularyProfile standard() {
    VocabularyProfile p;
    p.dimension_names = {"arousal", "valence", "power"};
    return p;
  }

  bool operator==(const VocabularyProfile &) const = default;
};

enum class Severity { error, warning };

constexpr std::string_view severity_name(Severity s) noexcept {
  return s == Severity::error ? "error" : "warning";
}

struct Finding {
  Severity severity = Severity::error;
  std::string code;
  std::string message;
  std::string location;

  bool operator==(const Finding &) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Finding> findings;

  void add(Severity severity, std::string code, std::string message,
           std::string location) {
    if (severity == Severity::error)
      ok = false;
    findings.push_back({severity, std::move(code), std::move(message),
                        std::move(location)});
  }
  void merge(const ValidationReport &other) {
    for (const auto &f : other.findings)
      add(f.severity, f.code, f.message, f.location);
  }
  std::size_t error_count() const {
    std::size_t n = 0;
    for (const auto &f : findings)
      n += f.severity == Severity::error;
    return n;
  }

  bool operator==(const ValidationReport &) const = default;
};

/// Attribute names with fixed meaning; a dimension or appraisal may not
/// reuse them.
inline bool is_reserved_attribute(std::string_view name) {
  static const std::set<std::string_view> reserved = {
      "category", "intensity", "probability", "modality", "simulate",
      "suppress", "amplify",   "attenuate",   "hide",     "start",
      "end",      "href",      "xlink:href"};
  return reserved.contains(name) || name.starts_with("xmlns");
}

/// Descriptor names are written as unprefixed XML attributes.
inline bool is_descriptor_name(std::string_view name) {
  if (name.empty() || is_reserved_attribute(name))
    return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!alpha(name.front()))
    return false;
  for (char c : name)
    if (!alpha(c) && !(c >= '0' && c <= '9') && c != '-' && c != '.')
      return false;
  return true;
}

namespace detail {

inline std::string join_location(const std::string &prefix,
                                 std::string_view field) {
  if (prefix.empty())
    return std::string(field);
  return prefix + "." + std::string(field);
}

inline void check_range(ValidationReport &report, const std::string &prefix,
                        std::string_view field, double value, double lo,
                        double hi) {
  if (!(value >= lo && value <= hi))
    report.add(Severity::error, "RANGE",
               std::string(field) + " = " + format_number(value) +
                   " outside [" + format_number(lo) + ", " +
                   format_number(hi) + "]",
               join_location(prefix, field));
}

inline void check_scope(ValidationReport &report, const std::string &prefix,
                        const Scope &scope) {
  const auto where = join_location(prefix, "scope");
  auto check_span = [&](double start, double end) {
    if (!std::isfinite(start) || !std::isfinite(end) || start < 0.0)
      report.add(Severity::error, "MALFORMED_SCOPE",
                 "time span bounds must be finite and start >= 0", where);
    else if (!(end > start))
      report.add(Severity::error, "MALFORMED_SCOPE",
                 "time span end must be after start", where);
  };
  auto check_uri = [&](const std::string &uri) {
    if (uri.empty())
      report.add(Severity::error, "MALFORMED_SCOPE", "empty reference", where);
  };
  std::visit(
      [&](const auto &s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, InlineText>) {
          if (trim(s.text).empty())
            report.add(Severity::error, "MALFORMED_SCOPE",
                       "inline text scope is blank", where);
        } else if constexpr (std::is_same_v<T, Reference>) {
          check_uri(s.uri);
        } else if constexpr (std::is_same_v<T, TimeSpan>) {
          check_span(s.start, s.end);
        } else if constexpr (std::is_same_v<T, ReferencedTimeSpan>) {
          check_uri(s.uri);
          check_span(s.start, s.end);
        }
      },
      scope);
}

inline void check_descriptors(ValidationReport &report,
                              const std::string &prefix,
                              const std::map<std::string, double> &values,
                              std::string_view kind,
                              const VocabularyProfile &profile,
                              bool (VocabularyProfile::*accepts)(
                                  const std::string &) const) {
  for (const auto &[name, value] : values) {
    const auto where = join_location(prefix, name);
    if (!is_descriptor_name(name)) {
      report.add(Severity::error, "BAD_DESCRIPTOR_NAME",
                 std::string(kind) + " name '" + name +
                     "' is not a usable attribute name",
                 where);
      continue;
    }
    if (!(profile.*accepts)(name)) {
      std::string code = "UNKNOWN_";
      for (char c : kind)
        code += static_cast<char>(c - 'a' + 'A');
      report.add(Severity::error, code,
                 std::string(kind) + " '" + name + "' not in profile", where);
    }
    check_range(report, prefix, name, value, -1.0, 1.0);
  }
}

inline void check_annotation(ValidationReport &report,
                             const std::string &prefix,
                             const EmotionAnnotation &a,
                             const VocabularyProfile &profile,
                             bool constituent) {
  if (!a.has_descriptor())
    report.add(Severity::error, "MISSING_DESCRIPTOR",
               "no category, dimension or appraisal", prefix);
  if (a.category) {
    if (a.category->empty())
      report.add(Severity::error, "UNKNOWN_CATEGORY", "empty category label",
                 join_location(prefix, "category"));
    else if (!profile.accepts_category(*a.category))
      report.add(Severity::error, "UNKNOWN_CATEGORY",
                 "category '" + *a.category + "' not in profile",
                 join_location(prefix, "category"));
  }
  check_descriptors(report, prefix, a.dimensions, "dimension", profile,
                    &VocabularyProfile::accepts_dimension);
  check_descriptors(report, prefix, a.appraisals, "appraisal", profile,
                    &VocabularyProfile::accepts_appraisal);
  for (const auto &[name, value] : a.dimensions)
    if (a.appraisals.contains(name))
      report.add(Severity::error, "DUPLICATE_DESCRIPTOR",
                 "'" + name + "' is both a dimension and an appraisal",
                 join_location(prefix, name));
  if (a.intensity)
    check_range(report, prefix, "intensity", *a.intensity, 0.0, 1.0);
  if (a.probability)
    check_range(report, prefix, "probability", *a.probability, 0.0, 1.0);
  for (const auto &[reg, value] : a.regulation) {
    check_range(report, prefix, regulation_name(reg), value, 0.0, 1.0);
    if (value == 0.0)
      report.add(Severity::warning, "ZERO_REGULATION",
                 std::string(regulation_name(reg)) + " = 0 has no effect",
                 join_location(prefix, regulation_name(reg)));
  }
  if (a.modality) {
    if (a.modality->empty() || !profile.accepts_modality(*a.modality))
      report.add(Severity::error, "UNKNOWN_MODALITY",
                 "modality '" + *a.modality + "' not in profile",
                 join_location(prefix, "modality"));
  }
  if (constituent) {
    if (!std::holds_alternative<Unscoped>(a.scope))
      report.add(Severity::error, "CONSTITUENT_SCOPE",
                 "constituents inherit the scope of their complex-emotion",
                 join_location(prefix, "scope"));
  } else {
    check_scope(report, prefix, a.scope);
  }
}

} // namespace detail

/// Checks an annotation against a profile. Problems are reported, never
/// thrown; findings come out in attribute order.
inline ValidationReport validate_annotation(const EmotionAnnotation &a,
                                            const VocabularyProfile &profile,
                                            const std::string &location = {}) {
  ValidationReport report;
  detail::check_annotation(report, location, a, profile, false);
  return report;
}

inline ValidationReport validate_annotation(const ComplexEmotion &c,
                                            const VocabularyProfile &profile,
                                            const std::string &location = {}) {
  ValidationReport report;
  if (c.constituents.size() < 2)
    report.add(Severity::error, "TOO_FEW_CONSTITUENTS",
               "a complex-emotion needs at least two constituents", location);
  detail::check_scope(report, location, c.scope);
  for (std::size_t i = 0; i < c.constituents.size(); ++i)
    detail::check_annotation(
        report, detail::join_location(location, "constituent[" +
                                                    std::to_string(i) + "]"),
        c.constituents[i], profile, true);
  return report;
}

inline ValidationReport validate_annotation(const Item &item,
                                            const VocabularyProfile &profile,
                                            const std::string &location = {}) {
  return std::visit(
      [&](const auto &x) { return validate_annotation(x, profile, location); },
      item);
}

/// Highest-intensity constituent (absent intensity counts as 1.0); the
/// earliest one wins a tie.
inline const EmotionAnnotation &dominant_constituent(const ComplexEmotion &c) {
  if (c.constituents.empty())
    throw std::invalid_argument("dominant_constituent: no constituents");
  const EmotionAnnotation *best = &c.constituents.front();
  for (const auto &a : c.constituents)
    if (a.effective_intensity() > best->effective_intensity())
      best = &a;
  return *best;
}

} // namespace earl

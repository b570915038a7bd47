#pragma once

// From a fused emotional estimate to motivated behaviours, and from those to
// resource access decisions.

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "earl/detail/number.hpp"
#include "earl/error.hpp"
#include "earl/fusion.hpp"
#include "earl/markers.hpp"

namespace earl {

struct Orientation {
  std::string behavior;
  double strength = 0.0;
  std::string category; // the scored category it came from

  bool operator==(const Orientation &) const = default;
};

struct NeedProfile {
  std::vector<Orientation> orientations; // strongest first
  std::vector<std::string> unmapped;     // scored categories with no behaviour

  /// Strength of a behaviour, 0 when absent.
  double strength_of(std::string_view behavior) const {
    for (const auto &o : orientations)
      if (o.behavior == behavior)
        return o.strength;
    return 0.0;
  }

  bool operator==(const NeedProfile &) const = default;
};

/// Each scored category with a motivated behaviour contributes that
/// behaviour at exactly its score. When two categories share a behaviour
/// (desire and its alias) the stronger one is kept.
inline NeedProfile infer_needs(const FusedEstimate &f) {
  NeedProfile profile;
  for (const auto &[category, score] : f.scores) {
    auto emotion = table_emotion_for(category);
    if (!emotion) {
      profile.unmapped.push_back(category);
      continue;
    }
    std::string behavior = behavior_for_emotion(*emotion);
    auto existing = std::find_if(
        profile.orientations.begin(), profile.orientations.end(),
        [&](const Orientation &o) { return o.behavior == behavior; });
    if (existing == profile.orientations.end())
      profile.orientations.push_back({behavior, score, category});
    else if (score > existing->strength)
      *existing = {behavior, score, category};
  }
  std::sort(profile.orientations.begin(), profile.orientations.end(),
            [](const Orientation &a, const Orientation &b) {
              if (a.strength != b.strength)
                return a.strength > b.strength;
              return a.behavior < b.behavior;
            });
  return profile;
}

struct AccessRule {
  std::string resource;
  std::string behavior;
  double threshold = 0.0;

  bool operator==(const AccessRule &) const = default;
};

struct AccessPolicy {
  std::vector<AccessRule> rules;

  bool operator==(const AccessPolicy &) const = default;
};

inline std::string describe(const AccessRule &r) {
  return r.resource + " deny_when " + r.behavior +
         " >= " + detail::format_number(r.threshold);
}

/// One rule per line: `resource_tag deny_when behavior >= threshold`.
inline AccessPolicy load_policy(std::string_view input) {
  AccessPolicy policy;
  std::set<std::pair<std::string, std::string>> seen;
  std::istringstream lines{std::string(input)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::string_view body = line;
    body = detail::trim(body.substr(0, body.find('#')));
    if (body.empty())
      continue;
    const std::string where = "line " + std::to_string(line_no);
    std::istringstream words{std::string(body)};
    std::string resource, keyword, behavior, op, threshold, extra;
    words >> resource >> keyword >> behavior >> op >> threshold;
    if (threshold.empty() || (words >> extra) || keyword != "deny_when" ||
        op != ">=")
      throw Error(Errc::malformed_policy,
                  where + ": expected 'resource deny_when behavior >= threshold'");
    if (!is_behavior(behavior))
      throw Error(Errc::malformed_policy,
                  where + ": unknown behaviour '" + behavior + "'");
    auto value = detail::parse_number(threshold);
    if (!value || *value < 0.0 || *value > 1.0)
      throw Error(Errc::malformed_policy,
                  where + ": threshold must be a number in [0, 1]");
    if (!seen.emplace(resource, behavior).second)
      throw Error(Errc::malformed_policy, where + ": duplicate rule for " +
                                              resource + " / " + behavior);
    policy.rules.push_back({resource, behavior, *value});
  }
  return policy;
}

enum class Verdict { allow, deny };

struct Decision {
  Verdict verdict = Verdict::allow;
  std::optional<AccessRule> rule; // set iff deny
  double score = 0.0;             // triggering strength
  bool ambiguous = false;
  std::string rationale;
};

/// Deny when a rule for `resource` sees its behaviour at or above its
/// threshold; the first such rule in policy order is reported. Ambiguous
/// estimates decide normally and say so in the rationale.
inline Decision decide_access(const FusedEstimate &f, std::string_view resource,
                              const AccessPolicy &policy) {
  Decision d;
  d.ambiguous = f.ambiguous;
  const NeedProfile needs = infer_needs(f);
  for (const auto &rule : policy.rules) {
    if (rule.resource != resource)
      continue;
    const double strength = needs.strength_of(rule.behavior);
    if (strength >= rule.threshold) {
      d.verdict = Verdict::deny;
      d.rule = rule;
      d.score = strength;
      d.rationale = "rule '" + describe(rule) + "' triggered by " +
                    rule.behavior + " = " + detail::format_number(strength);
      break;
    }
  }
  if (d.verdict == Verdict::allow)
    d.rationale = "no rule matched";
  if (!needs.unmapped.empty()) {
    d.rationale += "; unmapped categories:";
    for (const auto &c : needs.unmapped)
      d.rationale += " " + c;
  }
  if (d.ambiguous)
    d.rationale += "; estimate is ambiguous";
  return d;
}

} // namespace earl

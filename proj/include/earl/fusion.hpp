#pragma once

// Weighted fusion of per-modality emotion evidence, temporal carry-over for
// sources that drop out, and conversion of a fused estimate back to EARL.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "earl/detail/number.hpp"
#include "earl/error.hpp"
#include "earl/markers.hpp"
#include "earl/model.hpp"

namespace earl {

struct MarkerEvidence {
  EmotionAnnotation annotation; // category is required
  Source source = Source::face;
  double timestamp = 0.0;
  bool available = true;
  /// Set on evidence extrapolated by fill_missing rather than observed.
  bool predicted = false;

  bool operator==(const MarkerEvidence &) const = default;
};

struct FusionConfig {
  double ambiguity_epsilon = 0.1;
  double constituent_threshold = 0.2;
  double decay_lambda = 0.2; // per second
  double drop_floor = 0.05;
  std::map<Source, double> weight_overrides;

  double weight_for(Source s) const {
    if (auto it = weight_overrides.find(s); it != weight_overrides.end())
      return it->second;
    return base_weight_for_source(s);
  }

  /// Throws MALFORMED_CONFIG if any value is out of range.
  void check() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(ambiguity_epsilon))
      throw Error(Errc::malformed_config, "ambiguity_epsilon must be in [0, 1]");
    if (!unit(constituent_threshold))
      throw Error(Errc::malformed_config,
                  "constituent_threshold must be in [0, 1]");
    if (!(decay_lambda >= 0.0) || !std::isfinite(decay_lambda))
      throw Error(Errc::malformed_config, "decay_lambda must be >= 0");
    if (!unit(drop_floor))
      throw Error(Errc::malformed_config, "drop_floor must be in [0, 1]");
    for (const auto &[s, w] : weight_overrides)
      if (!(w > 0.0) || !std::isfinite(w))
        throw Error(Errc::malformed_config,
                    "weight." + std::string(source_name(s)) + " must be > 0");
  }
};

/// Flat `key=value` file; every key is optional. Keys: ambiguity_epsilon,
/// constituent_threshold, decay_lambda, drop_floor, weight.<source>.
inline FusionConfig load_fusion_config(std::string_view input) {
  FusionConfig cfg;
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
    auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::malformed_config, where + ": expected key=value");
    std::string key(detail::trim(body.substr(0, eq)));
    auto value = detail::parse_number(body.substr(eq + 1));
    if (!value)
      throw Error(Errc::malformed_config, where + ": '" + key + "' needs a number");
    if (key == "ambiguity_epsilon") cfg.ambiguity_epsilon = *value;
    else if (key == "constituent_threshold") cfg.constituent_threshold = *value;
    else if (key == "decay_lambda") cfg.decay_lambda = *value;
    else if (key == "drop_floor") cfg.drop_floor = *value;
    else if (key.starts_with("weight.")) {
      try {
        cfg.weight_overrides[source_from_name(key.substr(7))] = *value;
      } catch (const Error &) {
        throw Error(Errc::malformed_config, where + ": unknown source in '" + key + "'");
      }
    } else {
      throw Error(Errc::malformed_config, where + ": unknown key '" + key + "'");
    }
  }
  cfg.check();
  return cfg;
}

struct Contributor {
  Source source = Source::face;
  double weight = 0.0;
  bool predicted = false;

  auto operator<=>(const Contributor &) const = default;
};

/// Descriptors and regulation seen on the evidence for one category;
/// passed through to output constituents, never scored.
struct CarriedAttributes {
  std::map<std::string, double> dimensions;
  std::map<std::string, double> appraisals;
  std::map<Regulation, double> regulation;
  std::optional<std::string> modality;

  bool operator==(const CarriedAttributes &) const = default;
};

struct FusedEstimate {
  std::map<std::string, double> scores;
  std::optional<std::string> dominant;
  bool ambiguous = false;
  std::vector<Contributor> contributors; // sorted
  std::map<std::string, CarriedAttributes> carried;

  bool operator==(const FusedEstimate &) const = default;
};

namespace detail {

/// dominant = argmax (ties alphabetical); ambiguous when the two best
/// scores are closer than epsilon.
inline void rank_estimate(FusedEstimate &f, double epsilon) {
  f.dominant.reset();
  f.ambiguous = false;
  const std::string *best = nullptr;
  double top = 0.0, second = 0.0;
  bool have_second = false;
  for (const auto &[category, score] : f.scores) {
    if (!best || score > top) {
      if (best) {
        second = top;
        have_second = true;
      }
      best = &category;
      top = score;
    } else if (!have_second || score > second) {
      second = score;
      have_second = true;
    }
  }
  if (best)
    f.dominant = *best;
  f.ambiguous = have_second && (top - second) < epsilon;
}

inline double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms)
    sum += t;
  return sum;
}

} // namespace detail

/// score(c) = sum over evidence of category c of w * p * i, divided by the
/// total weight of all evidence. Missing p and i count as 1. Terms are summed
/// in sorted order so the result does not depend on input order.
inline FusedEstimate fuse_instant(const std::vector<MarkerEvidence> &evidence,
                                  const FusionConfig &cfg) {
  FusedEstimate f;
  std::vector<double> weights;
  std::map<std::string, std::vector<double>> terms;
  std::vector<const MarkerEvidence *> ordered;
  for (const auto &e : evidence) {
    if (!e.available)
      throw Error(Errc::unavailable_evidence,
                  std::string(source_name(e.source)) + " evidence at t=" +
                      detail::format_number(e.timestamp) + " is unavailable");
    if (!e.annotation.category || e.annotation.category->empty())
      throw Error(Errc::malformed_evidence, "evidence without a category");
    const double w = cfg.weight_for(e.source);
    weights.push_back(w);
    terms[*e.annotation.category].push_back(
        w * e.annotation.effective_probability() *
        e.annotation.effective_intensity());
    f.contributors.push_back({e.source, w, e.predicted});
    ordered.push_back(&e);
  }
  if (evidence.empty())
    return f;

  const double total = detail::ordered_sum(weights);
  for (auto &[category, t] : terms)
    f.scores[category] =
        total > 0.0 ? std::min(1.0, detail::ordered_sum(std::move(t)) / total)
                    : 0.0;
  std::sort(f.contributors.begin(), f.contributors.end());

  // Pass-through attributes: the heaviest evidence supplies a key first.
  std::stable_sort(ordered.begin(), ordered.end(),
                   [&](const MarkerEvidence *a, const MarkerEvidence *b) {
                     auto key = [&](const MarkerEvidence *e) {
                       const auto &x = e->annotation;
                       return std::make_tuple(
                           -cfg.weight_for(e->source), e->source, e->predicted,
                           -x.effective_probability(), -x.effective_intensity(),
                           e->timestamp, std::cref(x.dimensions),
                           std::cref(x.appraisals), std::cref(x.regulation));
                     };
                     return key(a) < key(b);
                   });
  std::map<std::string, std::set<std::string>> modalities;
  for (const auto *e : ordered) {
    auto &c = f.carried[*e->annotation.category];
    c.dimensions.insert(e->annotation.dimensions.begin(),
                        e->annotation.dimensions.end());
    c.appraisals.insert(e->annotation.appraisals.begin(),
                        e->annotation.appraisals.end());
    c.regulation.insert(e->annotation.regulation.begin(),
                        e->annotation.regulation.end());
    modalities[*e->annotation.category].insert(
        e->annotation.modality.value_or(""));
  }
  for (auto &[category, mods] : modalities)
    if (mods.size() == 1 && !mods.begin()->empty())
      f.carried[category].modality = *mods.begin();

  detail::rank_estimate(f, cfg.ambiguity_epsilon);
  return f;
}

/// Latest evidence per source and the stream clock.
struct TemporalState {
  std::map<Source, MarkerEvidence> last_evidence;
  double clock = 0.0;

  bool operator==(const TemporalState &) const = default;
};

/// Stores `e` as the latest evidence of its source and advances the clock.
/// Unavailable evidence advances the clock but keeps the previous
/// observation, which then decays.
inline TemporalState update_temporal(TemporalState s, const MarkerEvidence &e) {
  if (!(e.timestamp >= s.clock) || !std::isfinite(e.timestamp))
    throw Error(Errc::time_regression,
                "evidence at t=" + detail::format_number(e.timestamp) +
                    " after clock " + detail::format_number(s.clock));
  s.clock = e.timestamp;
  if (e.available)
    s.last_evidence.insert_or_assign(e.source, e);
  return s;
}

/// Carries every stored observation forward to `now`, scaling its
/// probability by exp(-lambda * elapsed). Items that fall below the drop
/// floor are omitted; anything with elapsed > 0 is flagged as predicted.
inline std::vector<MarkerEvidence> fill_missing(const TemporalState &s,
                                                double now,
                                                const FusionConfig &cfg) {
  if (!(now >= s.clock))
    throw Error(Errc::time_regression,
                "query at t=" + detail::format_number(now) + " before clock " +
                    detail::format_number(s.clock));
  std::vector<MarkerEvidence> out;
  for (const auto &[source, e] : s.last_evidence) {
    const double elapsed = now - e.timestamp;
    if (elapsed == 0.0) {
      out.push_back(e);
      continue;
    }
    const double p =
        e.annotation.effective_probability() * std::exp(-cfg.decay_lambda * elapsed);
    if (p < cfg.drop_floor)
      continue;
    MarkerEvidence copy = e;
    copy.annotation.probability = p;
    copy.timestamp = now;
    copy.predicted = true;
    out.push_back(std::move(copy));
  }
  return out;
}

/// Categories scoring at least the constituent threshold, strongest first.
/// One qualifying category gives a simple annotation, several a
/// complex-emotion whose first constituent is the dominant one.
inline Item to_complex_emotion(const FusedEstimate &f, const Scope &scope,
                               const FusionConfig &cfg) {
  std::vector<std::pair<std::string, double>> kept;
  for (const auto &[category, score] : f.scores)
    if (score > 0.0 && score >= cfg.constituent_threshold)
      kept.emplace_back(category, score);
  if (kept.empty())
    throw Error(Errc::no_signal, "no category reaches the threshold " +
                                     detail::format_number(cfg.constituent_threshold));
  std::stable_sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
    return a.second > b.second;
  });
  auto make = [&](const std::string &category, double score) {
    EmotionAnnotation a;
    a.category = category;
    a.probability = score;
    if (auto it = f.carried.find(category); it != f.carried.end()) {
      a.dimensions = it->second.dimensions;
      a.appraisals = it->second.appraisals;
      a.regulation = it->second.regulation;
      a.modality = it->second.modality;
    }
    return a;
  };
  if (kept.size() == 1) {
    EmotionAnnotation a = make(kept.front().first, kept.front().second);
    a.scope = scope;
    return a;
  }
  ComplexEmotion c;
  c.scope = scope;
  for (const auto &[category, score] : kept)
    c.constituents.push_back(make(category, score));
  return c;
}

} // namespace earl

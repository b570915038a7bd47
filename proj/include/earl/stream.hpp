#pragma once

// Evidence stream files: one observation per line, replayed through the
// temporal state.
//
//   <t> <source> <category> <p> <i>   observed category; p or i may be "-"
//   <t> <source> @<feature-file>      classify a voice/movement feature file
//   <t> <source> unavailable          the source lost track at t
//
// Blank lines and text after '#' are ignored. Feature paths are relative to
// the stream file's directory.

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "earl/detail/number.hpp"
#include "earl/document.hpp"
#include "earl/error.hpp"
#include "earl/fusion.hpp"
#include "earl/markers.hpp"

namespace earl {

inline std::string modality_for_source(Source s) {
  switch (s) {
  case Source::face: return "face";
  case Source::language_voice: return "voice";
  default: return "movement";
  }
}

/// Best-ranked emotion of a feature file as evidence; an all-zero ranking
/// yields unavailable evidence.
inline MarkerEvidence evidence_from_features(Source source, double t,
                                             std::string_view features) {
  RankedEmotions ranked;
  if (source == Source::language_voice)
    ranked = classify_voice(parse_voice_features(features));
  else if (source == Source::movement_kinematic ||
           source == Source::movement_kinetic)
    ranked = classify_movement(parse_movement_features(features));
  else
    throw Error(Errc::malformed_evidence,
                "no feature classifier for source '" +
                    std::string(source_name(source)) + "'");
  MarkerEvidence e;
  e.source = source;
  e.timestamp = t;
  if (ranked.empty() || ranked.front().score <= 0.0) {
    e.available = false;
    return e;
  }
  e.annotation.category = ranked.front().label;
  e.annotation.probability = ranked.front().score;
  e.annotation.modality = modality_for_source(source);
  return e;
}

inline std::vector<MarkerEvidence>
load_evidence_stream(std::string_view input,
                     const std::filesystem::path &base_dir = ".") {
  std::vector<MarkerEvidence> out;
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
    std::vector<std::string> f;
    for (std::string w; words >> w;)
      f.push_back(w);
    if (f.size() != 3 && f.size() != 5)
      throw Error(Errc::malformed_evidence,
                  where + ": expected 't source category p i'");
    auto t = detail::parse_number(f[0]);
    if (!t || *t < 0.0)
      throw Error(Errc::malformed_evidence, where + ": bad timestamp '" + f[0] + "'");
    Source source;
    try {
      source = source_from_name(f[1]);
    } catch (const Error &e) {
      throw Error(Errc::unknown_source, where + ": '" + f[1] + "'");
    }
    if (f.size() == 3) {
      if (f[2] == "unavailable") {
        MarkerEvidence e;
        e.source = source;
        e.timestamp = *t;
        e.available = false;
        out.push_back(std::move(e));
      } else if (f[2].starts_with('@')) {
        std::string features;
        try {
          features = read_file(base_dir / f[2].substr(1));
        } catch (const std::runtime_error &) {
          throw Error(Errc::malformed_evidence,
                      where + ": cannot read '" + f[2].substr(1) + "'");
        }
        out.push_back(evidence_from_features(source, *t, features));
      } else {
        throw Error(Errc::malformed_evidence,
                    where + ": expected 't source category p i'");
      }
      continue;
    }
    auto unit = [&](const std::string &text,
                    const char *what) -> std::optional<double> {
      if (text == "-")
        return std::nullopt;
      auto v = detail::parse_number(text);
      if (!v || *v < 0.0 || *v > 1.0)
        throw Error(Errc::malformed_evidence,
                    where + ": " + what + " must be in [0, 1] or '-'");
      return v;
    };
    MarkerEvidence e;
    e.source = source;
    e.timestamp = *t;
    e.annotation.category = f[2];
    e.annotation.probability = unit(f[3], "probability");
    e.annotation.intensity = unit(f[4], "intensity");
    e.annotation.modality = modality_for_source(source);
    out.push_back(std::move(e));
  }
  return out;
}

/// Replays a stream and fuses what is known at `now` (default: the time of
/// the last line).
inline FusedEstimate fuse_stream(const std::vector<MarkerEvidence> &stream,
                                 const FusionConfig &cfg,
                                 std::optional<double> now = std::nullopt) {
  TemporalState state;
  for (const auto &e : stream)
    state = update_temporal(std::move(state), e);
  return fuse_instant(fill_missing(state, now.value_or(state.clock), cfg), cfg);
}

} // namespace earl

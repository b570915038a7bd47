#pragma once

// Marker knowledge base: emotion -> motivated behaviour, the linguistic
// marker lexicon, rule classifiers for voice and body-movement features and
// per-source capture weights.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "earl/detail/number.hpp"
#include "earl/error.hpp"
#include "earl/model.hpp"

namespace earl {

// --- emotion -> motivated behaviour ----------------------------------------

inline constexpr std::array<std::pair<std::string_view, std::string_view>, 6>
    behavior_table = {{{"desire", "searching"},
                       {"anger", "aggressive"},
                       {"fear", "protective"},
                       {"sadness", "dejected"},
                       {"joy", "gratulant"},
                       {"affection", "caressive"}}};

/// Lexicon and behaviour table name the same state differently.
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 1>
    emotion_aliases = {{{"sensuality", "desire"}}};

inline std::string behavior_for_emotion(std::string_view emotion) {
  for (const auto &[e, b] : behavior_table)
    if (e == emotion)
      return std::string(b);
  throw Error(Errc::unknown_emotion, "'" + std::string(emotion) +
                                         "' has no motivated behaviour");
}

inline bool is_behavior(std::string_view behavior) {
  return std::any_of(behavior_table.begin(), behavior_table.end(),
                     [&](const auto &row) { return row.second == behavior; });
}

/// Behaviour-table emotion for a category label, following aliases.
inline std::optional<std::string> table_emotion_for(std::string_view label) {
  for (const auto &[alias, target] : emotion_aliases)
    if (alias == label)
      return std::string(target);
  for (const auto &[e, b] : behavior_table)
    if (e == label)
      return std::string(e);
  return std::nullopt;
}

// --- lexicon ----------------------------------------------------------------

namespace detail {

inline bool is_letter(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

} // namespace detail

/// Splits on non-letter boundaries and lowercases ASCII letters. Bytes of
/// multi-byte UTF-8 sequences count as letters.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (detail::is_letter(static_cast<unsigned char>(c))) {
      current += detail::ascii_lower(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty())
    tokens.push_back(std::move(current));
  return tokens;
}

/// A marker is a sequence of one or more tokens ("goose bumps" has two),
/// stored space-joined in normalised form.
struct Lexicon {
  std::map<std::string, std::set<std::string>> entries;

  bool operator==(const Lexicon &) const = default;
};

inline std::string normalize_marker(std::string_view marker) {
  std::string out;
  for (const auto &t : tokenize(marker)) {
    if (!out.empty())
      out += ' ';
    out += t;
  }
  return out;
}

/// `emotion: marker, marker, ...` per line; `#` starts a comment.
inline Lexicon load_lexicon(std::string_view input) {
  Lexicon lex;
  std::map<std::string, std::string> owner;
  std::istringstream lines{std::string(input)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::string_view body = line;
    body = body.substr(0, body.find('#'));
    body = detail::trim(body);
    if (body.empty())
      continue;
    const std::string where = "line " + std::to_string(line_no);
    auto colon = body.find(':');
    if (colon == std::string_view::npos)
      throw Error(Errc::malformed_lexicon, where + ": expected 'emotion: markers'");
    std::string emotion = normalize_marker(body.substr(0, colon));
    if (emotion.empty() || emotion.find(' ') != std::string::npos)
      throw Error(Errc::malformed_lexicon, where + ": bad emotion label");
    if (lex.entries.contains(emotion))
      throw Error(Errc::malformed_lexicon,
                  where + ": emotion '" + emotion + "' listed twice");
    auto &markers = lex.entries[emotion];
    std::string_view rest = body.substr(colon + 1);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string_view raw = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{}
                                             : rest.substr(comma + 1);
      if (detail::trim(raw).empty())
        continue;
      std::string marker = normalize_marker(raw);
      if (marker.empty())
        throw Error(Errc::malformed_lexicon,
                    where + ": marker '" + std::string(detail::trim(raw)) +
                        "' has no letters");
      auto [it, fresh] = owner.emplace(marker, emotion);
      if (!fresh)
        throw Error(Errc::duplicate_marker,
                    where + ": '" + marker + "' already belongs to " +
                        it->second);
      markers.insert(marker);
    }
    if (markers.empty())
      throw Error(Errc::empty_emotion, where + ": '" + emotion + "' has no markers");
  }
  return lex;
}

/// Linguistic markers for seven emotions.
inline constexpr std::string_view default_lexicon_text =
    R"lex(# Linguistic markers of emotion.
# One line per emotion: "emotion: marker, marker, ...".
activation: disinhibited, excited, active, agitated, energetic, fiery
amazement: amazed, admiring, fascinated, impressed, goose bumps, thrills
dysphoria: anxious, anguished, frightened, angry, irritated, nervous, revolted, tense
joy: joyful, happy, radiant, elated, content
power: heroic, triumphant, proud, strong
sadness: sorrowful, depressed, sad
# "sensuality (desire)"; desire is an alias for behaviour lookups
sensuality: sensual, desirous, aroused
)lex";

inline const Lexicon &default_lexicon() {
  static const Lexicon lex = load_lexicon(default_lexicon_text);
  return lex;
}

struct LexicalMatch {
  EmotionAnnotation annotation;
  std::vector<std::string> tokens;
};

/// Tags text with one annotation per emotion whose markers occur in it.
/// Multi-token markers match greedily, longest first; each occurrence counts
/// once. intensity = min(1, matches/3), probability = matches / all matches.
/// Ordered by match count, then label.
inline std::vector<LexicalMatch> tag_lexical(std::string_view text,
                                             const Lexicon &lex) {
  std::map<std::string, std::string> marker_owner;
  std::size_t longest = 1;
  for (const auto &[emotion, markers] : lex.entries)
    for (const auto &m : markers) {
      marker_owner.emplace(m, emotion);
      longest = std::max<std::size_t>(
          longest, 1 + static_cast<std::size_t>(
                           std::count(m.begin(), m.end(), ' ')));
    }

  const auto tokens = tokenize(text);
  std::map<std::string, std::vector<std::string>> hits;
  std::size_t total = 0;
  for (std::size_t i = 0; i < tokens.size();) {
    std::size_t taken = 0;
    for (std::size_t n = std::min(longest, tokens.size() - i); n > 0; --n) {
      std::string candidate = tokens[i];
      for (std::size_t k = 1; k < n; ++k)
        candidate += ' ' + tokens[i + k];
      if (auto it = marker_owner.find(candidate); it != marker_owner.end()) {
        hits[it->second].push_back(candidate);
        ++total;
        taken = n;
        break;
      }
    }
    i += taken ? taken : 1;
  }

  std::vector<LexicalMatch> out;
  for (auto &[emotion, matched] : hits) {
    LexicalMatch m;
    const double count = static_cast<double>(matched.size());
    m.annotation.category = emotion;
    m.annotation.modality = "language";
    m.annotation.intensity = std::min(1.0, count / 3.0);
    m.annotation.probability = count / static_cast<double>(total);
    m.annotation.scope = InlineText{std::string(text)};
    m.tokens = std::move(matched);
    out.push_back(std::move(m));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.tokens.size() > b.tokens.size();
  });
  return out;
}

// --- ranked output ------------------------------------------------------------

struct RankedEmotion {
  std::string label;
  double score = 0.0;
  std::vector<std::string> matched_features;

  bool operator==(const RankedEmotion &) const = default;
};

using RankedEmotions = std::vector<RankedEmotion>;

namespace detail {

inline void rank(RankedEmotions &r) {
  std::sort(r.begin(), r.end(), [](const auto &a, const auto &b) {
    if (a.score != b.score)
      return a.score > b.score;
    return a.label < b.label;
  });
}

/// One categorical feature slot. Values are small integers; `neutral` never
/// matches or contradicts and `opposite` says which value pairs conflict.
struct Slot {
  std::string_view name;
  int value;
};

template <class Pattern, class OppositeFn, class NeutralFn, class NameFn>
RankedEmotion score_pattern(std::string_view label, const Pattern &pattern,
                            const std::vector<Slot> &observed,
                            OppositeFn opposite, NeutralFn neutral,
                            NameFn value_name) {
  RankedEmotion r{std::string(label), 0.0, {}};
  if (pattern.empty())
    return r;
  int matched = 0, against = 0;
  for (const auto &obs : observed) {
    auto expected = std::find_if(pattern.begin(), pattern.end(),
                                 [&](const Slot &s) { return s.name == obs.name; });
    if (neutral(obs.name, obs.value))
      continue;
    if (expected == pattern.end()) {
      // Observed but not part of the pattern: counts against it.
      ++against;
    } else if (expected->value == obs.value) {
      ++matched;
      r.matched_features.push_back(std::string(obs.name) + "=" +
                                   std::string(value_name(obs.name, obs.value)));
    } else if (opposite(obs.name, obs.value, expected->value)) {
      ++against;
    }
  }
  double score = static_cast<double>(matched - against) /
                 static_cast<double>(pattern.size());
  r.score = std::clamp(score, 0.0, 1.0);
  return r;
}

} // namespace detail

// --- voice ------------------------------------------------------------------

enum class Direction { flat, up, down };
enum class Contour { flat, upward, downward };

constexpr std::string_view direction_name(Direction d) noexcept {
  switch (d) {
  case Direction::up: return "up";
  case Direction::down: return "down";
  default: return "flat";
  }
}
constexpr std::string_view contour_name(Contour c) noexcept {
  switch (c) {
  case Contour::upward: return "upward";
  case Contour::downward: return "downward";
  default: return "flat";
  }
}

/// Direction of change of each acoustic parameter against the speaker's
/// baseline. `flat` is the neutral value everywhere.
struct VoiceFeatureDelta {
  Direction mean_f0 = Direction::flat;
  Direction f0_range = Direction::flat;
  Direction f0_variability = Direction::flat;
  Direction mean_energy = Direction::flat;
  Direction high_freq_energy = Direction::flat;
  Contour f0_contour = Contour::flat;
  Direction articulation_rate = Direction::flat;

  bool operator==(const VoiceFeatureDelta &) const = default;
};

namespace detail {

inline std::vector<Slot> voice_slots(const VoiceFeatureDelta &v) {
  return {{"mean_f0", static_cast<int>(v.mean_f0)},
          {"f0_range", static_cast<int>(v.f0_range)},
          {"f0_variability", static_cast<int>(v.f0_variability)},
          {"mean_energy", static_cast<int>(v.mean_energy)},
          {"high_freq_energy", static_cast<int>(v.high_freq_energy)},
          {"f0_contour", static_cast<int>(v.f0_contour)},
          {"articulation_rate", static_cast<int>(v.articulation_rate)}};
}

constexpr int up = static_cast<int>(Direction::up);
constexpr int down = static_cast<int>(Direction::down);
constexpr int downward = static_cast<int>(Contour::downward);

struct VoicePattern {
  std::string_view emotion;
  std::vector<Slot> slots;
};

inline const std::vector<VoicePattern> &voice_patterns() {
  static const std::vector<VoicePattern> patterns = {
      {"anger",
       {{"mean_f0", up},
        {"mean_energy", up},
        {"f0_variability", up},
        {"f0_range", up},
        {"high_freq_energy", up},
        {"f0_contour", downward},
        {"articulation_rate", up}}},
      {"disgust", {}},
      {"fear",
       {{"mean_f0", up},
        {"f0_range", up},
        {"high_freq_energy", up},
        {"articulation_rate", up}}},
      {"joy",
       {{"mean_f0", up},
        {"f0_range", up},
        {"f0_variability", up},
        {"mean_energy", up}}},
      {"sadness",
       {{"mean_f0", down},
        {"f0_range", down},
        {"mean_energy", down},
        {"f0_contour", downward}}},
  };
  return patterns;
}

} // namespace detail

/// Scores every voice pattern: (matched - against) / pattern size, clamped
/// to [0, 1]. A non-flat observation counts against a pattern when it is
/// the opposite direction or when the pattern does not mention that
/// parameter. Disgust has no pattern and always scores 0.
inline RankedEmotions classify_voice(const VoiceFeatureDelta &v) {
  const auto observed = detail::voice_slots(v);
  auto neutral = [](std::string_view, int value) { return value == 0; };
  // up/down and upward/downward share the encodings 1/2.
  auto opposite = [](std::string_view, int a, int b) {
    return (a == 1 && b == 2) || (a == 2 && b == 1);
  };
  auto name = [](std::string_view field, int value) {
    return field == "f0_contour" ? contour_name(static_cast<Contour>(value))
                                 : direction_name(static_cast<Direction>(value));
  };
  RankedEmotions out;
  for (const auto &p : detail::voice_patterns())
    out.push_back(detail::score_pattern(p.emotion, p.slots, observed, opposite,
                                        neutral, name));
  detail::rank(out);
  return out;
}

// --- movement ---------------------------------------------------------------

enum class Span { mid, short_, long_ };
enum class TempoChanges { neutral, frequent, few };
enum class SpatialExtent { neutral, outward_from_centre, close_to_centre };
enum class Tension {
  neutral,
  dynamic_high,
  sustained_high,
  continuously_low,
  dynamic_varying
};

constexpr std::string_view span_name(Span s) noexcept {
  switch (s) {
  case Span::short_: return "short";
  case Span::long_: return "long";
  default: return "mid";
  }
}
constexpr std::string_view tempo_name(TempoChanges t) noexcept {
  switch (t) {
  case TempoChanges::frequent: return "frequent";
  case TempoChanges::few: return "few";
  default: return "neutral";
  }
}
constexpr std::string_view spatial_name(SpatialExtent s) noexcept {
  switch (s) {
  case SpatialExtent::outward_from_centre: return "outward_from_centre";
  case SpatialExtent::close_to_centre: return "close_to_centre";
  default: return "neutral";
  }
}
constexpr std::string_view tension_name(Tension t) noexcept {
  switch (t) {
  case Tension::dynamic_high: return "dynamic_high";
  case Tension::sustained_high: return "sustained_high";
  case Tension::continuously_low: return "continuously_low";
  case Tension::dynamic_varying: return "dynamic_varying";
  default: return "neutral";
  }
}

/// Time (duration, tempo changes, stops), space and weight (tension)
/// descriptors of a movement. `mid` and `neutral` carry no evidence.
struct MovementDescriptor {
  Span duration = Span::mid;
  TempoChanges tempo_changes = TempoChanges::neutral;
  Span stop_length = Span::mid;
  SpatialExtent spatial_extent = SpatialExtent::neutral;
  Tension tension = Tension::neutral;

  bool operator==(const MovementDescriptor &) const = default;
};

namespace detail {

inline std::vector<Slot> movement_slots(const MovementDescriptor &m) {
  return {{"duration", static_cast<int>(m.duration)},
          {"tempo_changes", static_cast<int>(m.tempo_changes)},
          {"stop_length", static_cast<int>(m.stop_length)},
          {"spatial_extent", static_cast<int>(m.spatial_extent)},
          {"tension", static_cast<int>(m.tension)}};
}

inline bool movement_opposite(std::string_view field, int a, int b) {
  if (field == "tension") {
    auto high = [](int t) {
      return t == static_cast<int>(Tension::dynamic_high) ||
             t == static_cast<int>(Tension::sustained_high);
    };
    auto low = [](int t) { return t == static_cast<int>(Tension::continuously_low); };
    return (high(a) && low(b)) || (low(a) && high(b));
  }
  // Every other field is {neutral, x, opposite-of-x}.
  return (a == 1 && b == 2) || (a == 2 && b == 1);
}

inline std::string_view movement_value_name(std::string_view field, int v) {
  if (field == "duration" || field == "stop_length")
    return span_name(static_cast<Span>(v));
  if (field == "tempo_changes")
    return tempo_name(static_cast<TempoChanges>(v));
  if (field == "spatial_extent")
    return spatial_name(static_cast<SpatialExtent>(v));
  return tension_name(static_cast<Tension>(v));
}

struct MovementPattern {
  std::string_view emotion;
  std::vector<Slot> slots;
};

inline const std::vector<MovementPattern> &movement_patterns() {
  constexpr auto S = [](auto v) { return static_cast<int>(v); };
  static const std::vector<MovementPattern> patterns = {
      {"anger",
       {{"duration", S(Span::short_)},
        {"tempo_changes", S(TempoChanges::frequent)},
        {"stop_length", S(Span::short_)},
        {"spatial_extent", S(SpatialExtent::outward_from_centre)},
        {"tension", S(Tension::dynamic_high)}}},
      {"fear",
       {{"tempo_changes", S(TempoChanges::frequent)},
        {"stop_length", S(Span::long_)},
        {"spatial_extent", S(SpatialExtent::close_to_centre)},
        {"tension", S(Tension::sustained_high)}}},
      {"grief",
       {{"duration", S(Span::long_)},
        {"tempo_changes", S(TempoChanges::few)},
        {"tension", S(Tension::continuously_low)}}},
      {"joy",
       {{"tempo_changes", S(TempoChanges::frequent)},
        {"stop_length", S(Span::long_)},
        {"spatial_extent", S(SpatialExtent::outward_from_centre)},
        {"tension", S(Tension::dynamic_varying)}}},
  };
  return patterns;
}

} // namespace detail

/// Same scoring rule as classify_voice. High and low tension oppose each
/// other; the dynamic/sustained/varying distinctions among them do not.
inline RankedEmotions classify_movement(const MovementDescriptor &m) {
  const auto observed = detail::movement_slots(m);
  auto neutral = [](std::string_view, int value) { return value == 0; };
  RankedEmotions out;
  for (const auto &p : detail::movement_patterns())
    out.push_back(detail::score_pattern(p.emotion, p.slots, observed,
                                        detail::movement_opposite, neutral,
                                        detail::movement_value_name));
  detail::rank(out);
  return out;
}

// --- feature files ----------------------------------------------------------

namespace detail {

template <class Fn>
void for_each_feature_line(std::string_view input, Fn &&fn) {
  std::istringstream lines{std::string(input)};
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(lines, line)) {
    ++line_no;
    std::string_view body = line;
    body = trim(body.substr(0, body.find('#')));
    if (body.empty())
      continue;
    const std::string where = "line " + std::to_string(line_no);
    auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::malformed_features, where + ": expected field=value");
    std::string key(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    if (!seen.insert(key).second)
      throw Error(Errc::malformed_features, where + ": '" + key + "' given twice");
    if (!fn(key, value))
      throw Error(Errc::malformed_features,
                  where + ": bad feature '" + key + "=" + value + "'");
  }
}

template <class E, class NameFn>
bool assign_enum(E &out, const std::string &value, std::initializer_list<E> all,
                 NameFn name) {
  for (E e : all)
    if (name(e) == value) {
      out = e;
      return true;
    }
  return false;
}

} // namespace detail

/// `field=value` per line; omitted fields stay flat.
inline VoiceFeatureDelta parse_voice_features(std::string_view input) {
  VoiceFeatureDelta v;
  const std::initializer_list<Direction> dirs = {Direction::flat, Direction::up,
                                                 Direction::down};
  detail::for_each_feature_line(input, [&](const std::string &k,
                                           const std::string &val) {
    auto dir = [&](Direction &d) {
      return detail::assign_enum(d, val, dirs, direction_name);
    };
    if (k == "mean_f0") return dir(v.mean_f0);
    if (k == "f0_range") return dir(v.f0_range);
    if (k == "f0_variability") return dir(v.f0_variability);
    if (k == "mean_energy") return dir(v.mean_energy);
    if (k == "high_freq_energy") return dir(v.high_freq_energy);
    if (k == "articulation_rate") return dir(v.articulation_rate);
    if (k == "f0_contour")
      return detail::assign_enum(
          v.f0_contour, val, {Contour::flat, Contour::upward, Contour::downward},
          contour_name);
    return false;
  });
  return v;
}

/// `field=value` per line; omitted fields stay neutral.
inline MovementDescriptor parse_movement_features(std::string_view input) {
  MovementDescriptor m;
  detail::for_each_feature_line(input, [&](const std::string &k,
                                           const std::string &val) {
    const std::initializer_list<Span> spans = {Span::mid, Span::short_,
                                               Span::long_};
    if (k == "duration") return detail::assign_enum(m.duration, val, spans, span_name);
    if (k == "stop_length")
      return detail::assign_enum(m.stop_length, val, spans, span_name);
    if (k == "tempo_changes")
      return detail::assign_enum(
          m.tempo_changes, val,
          {TempoChanges::neutral, TempoChanges::frequent, TempoChanges::few},
          tempo_name);
    if (k == "spatial_extent")
      return detail::assign_enum(m.spatial_extent, val,
                                 {SpatialExtent::neutral,
                                  SpatialExtent::outward_from_centre,
                                  SpatialExtent::close_to_centre},
                                 spatial_name);
    if (k == "tension")
      return detail::assign_enum(
          m.tension, val,
          {Tension::neutral, Tension::dynamic_high, Tension::sustained_high,
           Tension::continuously_low, Tension::dynamic_varying},
          tension_name);
    return false;
  });
  return m;
}

// --- capture sources ----------------------------------------------------------

enum class Source { face, language_voice, movement_kinematic, movement_kinetic };

inline constexpr Source all_sources[] = {Source::face, Source::language_voice,
                                         Source::movement_kinematic,
                                         Source::movement_kinetic};

constexpr std::string_view source_name(Source s) noexcept {
  switch (s) {
  case Source::face: return "face";
  case Source::language_voice: return "language_voice";
  case Source::movement_kinematic: return "movement_kinematic";
  case Source::movement_kinetic: return "movement_kinetic";
  }
  return "";
}

inline Source source_from_name(std::string_view name) {
  for (Source s : all_sources)
    if (source_name(s) == name)
      return s;
  throw Error(Errc::unknown_source, "'" + std::string(name) + "'");
}

/// Capture convenience as a weight: good 1.0, middle 0.6, bad 0.2. Kinetic
/// capture is rated by its worst setup (force platforms).
constexpr double base_weight_for_source(Source s) noexcept {
  switch (s) {
  case Source::face: return 1.0;
  case Source::language_voice: return 1.0;
  case Source::movement_kinematic: return 0.6;
  case Source::movement_kinetic: return 0.2;
  }
  return 0.0;
}

inline double base_weight_for_source(std::string_view name) {
  return base_weight_for_source(source_from_name(name));
}

} // namespace earl

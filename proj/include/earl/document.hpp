#pragma once

// Reading and writing EARL XML documents and vocabulary profiles, plus
// resolution of annotation scopes against a corpus directory.

#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "earl/detail/number.hpp"
#include "earl/detail/xml_reader.hpp"
#include "earl/error.hpp"
#include "earl/model.hpp"

namespace earl {

struct AnnotationDocument {
  std::vector<Item> items;
  std::optional<std::string> source_uri;

  bool operator==(const AnnotationDocument &) const = default;
};

/// A parsed document plus the non-fatal findings collected on the way
/// (unknown attributes, ignored elements, alias normalisation).
struct ParsedDocument {
  AnnotationDocument document;
  std::vector<Finding> warnings;
};

inline constexpr std::string_view root_element = "earl";
inline constexpr std::string_view xlink_namespace =
    "http://www.w3.org/1999/xlink";

namespace detail {

class EarlBuilder {
public:
  EarlBuilder(const VocabularyProfile &profile, std::vector<Finding> &warnings)
      : profile_(profile), warnings_(warnings) {}

  void walk(const std::vector<XmlNode> &nodes, AnnotationDocument &doc,
            bool top_level) {
    for (const auto &node : nodes) {
      if (node.is_text) {
        if (top_level && !trim(node.text).empty())
          throw Error(Errc::malformed_xml,
                      "line " + std::to_string(node.line) +
                          ": character data outside any element");
        continue;
      }
      if (node.name == "emotion") {
        doc.items.emplace_back(build_emotion(node, false));
      } else if (node.name == "complex-emotion") {
        doc.items.emplace_back(build_complex(node));
      } else {
        if (node.name == root_element && !doc.source_uri) {
          if (const auto *src = node.attribute("source"))
            doc.source_uri = *src;
        }
        walk(node.children, doc, false);
      }
    }
  }

private:
  const VocabularyProfile &profile_;
  std::vector<Finding> &warnings_;

  void warn(std::string code, std::string message, const XmlNode &node) {
    warnings_.push_back({Severity::warning, std::move(code),
                         std::move(message),
                         "line " + std::to_string(node.line)});
  }

  static double number(const XmlNode &node, const std::string &key,
                       const std::string &value) {
    auto parsed = parse_number(value);
    if (!parsed)
      throw Error(Errc::unparseable_number,
                  "line " + std::to_string(node.line) + ": " + key + "=\"" +
                      value + "\"");
    return *parsed;
  }

  struct ScopeAttributes {
    std::optional<std::string> uri;
    std::optional<double> start;
    std::optional<double> end;
  };

  static bool take_scope_attribute(const XmlNode &node, const std::string &key,
                                   const std::string &value,
                                   ScopeAttributes &out) {
    if (key == "xlink:href" || key == "href") {
      out.uri = value;
    } else if (key == "start") {
      out.start = number(node, key, value);
    } else if (key == "end") {
      out.end = number(node, key, value);
    } else {
      return false;
    }
    return true;
  }

  static std::string direct_text(const XmlNode &node) {
    std::string text;
    for (const auto &child : node.children)
      if (child.is_text)
        text += child.text;
    return text;
  }

  Scope make_scope(const XmlNode &node, const ScopeAttributes &attrs) {
    const std::string text = direct_text(node);
    const bool has_text = !trim(text).empty();
    if (attrs.start.has_value() != attrs.end.has_value())
      throw Error(Errc::incomplete_time_span,
                  "line " + std::to_string(node.line) +
                      ": start and end must be given together");
    if (attrs.start) {
      if (!(*attrs.end > *attrs.start))
        throw Error(Errc::start_after_end,
                    "line " + std::to_string(node.line) + ": start=" +
                        format_number(*attrs.start) +
                        " end=" + format_number(*attrs.end));
    }
    if ((attrs.uri || attrs.start) && has_text)
      warn("IGNORED_TEXT", "enclosed text ignored; scope comes from attributes",
           node);
    if (attrs.uri && attrs.start)
      return ReferencedTimeSpan{*attrs.uri, *attrs.start, *attrs.end};
    if (attrs.start)
      return TimeSpan{*attrs.start, *attrs.end};
    if (attrs.uri)
      return Reference{*attrs.uri};
    if (has_text)
      return InlineText{text};
    return Unscoped{};
  }

  EmotionAnnotation build_emotion(const XmlNode &node, bool constituent) {
    EmotionAnnotation a;
    ScopeAttributes scope;
    std::optional<double> hide;
    for (const auto &[key, value] : node.attributes) {
      if (key.starts_with("xmlns"))
        continue;
      if (take_scope_attribute(node, key, value, scope))
        continue;
      if (key == "category") {
        a.category = value;
      } else if (key == "intensity") {
        a.intensity = number(node, key, value);
      } else if (key == "probability") {
        a.probability = number(node, key, value);
      } else if (key == "modality") {
        a.modality = value;
      } else if (key == "hide") {
        hide = number(node, key, value);
      } else if (auto reg = regulation_from_name(key)) {
        a.regulation[*reg] = number(node, key, value);
      } else if (profile_.dimension_names.contains(key)) {
        a.dimensions[key] = number(node, key, value);
      } else if (profile_.appraisal_names.contains(key)) {
        a.appraisals[key] = number(node, key, value);
      } else if (auto v = parse_number(value); v && is_descriptor_name(key)) {
        a.appraisals[key] = *v;
        if (!profile_.appraisal_names.empty() || profile_.strict)
          warn("UNKNOWN_ATTRIBUTE",
               "'" + key + "' not in profile; kept as appraisal", node);
      } else {
        warn("UNKNOWN_ATTRIBUTE", "'" + key + "' ignored", node);
      }
    }
    if (hide) {
      if (a.regulation.contains(Regulation::suppress)) {
        warn("REGULATION_ALIAS", "'hide' ignored; 'suppress' also given", node);
      } else {
        a.regulation[Regulation::suppress] = *hide;
        warn("REGULATION_ALIAS", "'hide' read as 'suppress'", node);
      }
    }
    for (const auto &child : node.children) {
      if (child.is_text)
        continue;
      if (child.name == "complex-emotion" && constituent)
        throw Error(Errc::nested_complex,
                    "line " + std::to_string(child.line) +
                        ": complex-emotion inside complex-emotion");
      warn("UNKNOWN_ELEMENT", "<" + child.name + "> inside <emotion> ignored",
           child);
    }
    a.scope = make_scope(node, scope);
    return a;
  }

  ComplexEmotion build_complex(const XmlNode &node) {
    ComplexEmotion c;
    ScopeAttributes scope;
    for (const auto &[key, value] : node.attributes) {
      if (key.starts_with("xmlns"))
        continue;
      if (!take_scope_attribute(node, key, value, scope))
        warn("UNKNOWN_ATTRIBUTE",
             "'" + key + "' ignored on <complex-emotion>", node);
    }
    for (const auto &child : node.children) {
      if (child.is_text)
        continue;
      if (child.name == "emotion")
        c.constituents.push_back(build_emotion(child, true));
      else if (child.name == "complex-emotion")
        throw Error(Errc::nested_complex,
                    "line " + std::to_string(child.line) +
                        ": complex-emotion inside complex-emotion");
      else
        warn("UNKNOWN_ELEMENT",
             "<" + child.name + "> inside <complex-emotion> ignored", child);
    }
    c.scope = make_scope(node, scope);
    return c;
  }
};

inline void escape_into(std::string &out, std::string_view text,
                        bool attribute) {
  for (char c : text) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '\r': out += "&#13;"; break;
    case '"':
      out += attribute ? "&quot;" : "\"";
      break;
    case '\n':
      out += attribute ? "&#10;" : "\n";
      break;
    case '\t':
      out += attribute ? "&#9;" : "\t";
      break;
    default: out += c;
    }
  }
}

inline void attribute_into(std::string &out, std::string_view key,
                           std::string_view value) {
  out += ' ';
  out += key;
  out += "=\"";
  escape_into(out, value, true);
  out += '"';
}

inline void scope_attributes_into(std::string &out, const Scope &scope) {
  std::visit(
      [&](const auto &s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Reference>) {
          attribute_into(out, "xlink:href", s.uri);
        } else if constexpr (std::is_same_v<T, TimeSpan>) {
          attribute_into(out, "start", format_number(s.start));
          attribute_into(out, "end", format_number(s.end));
        } else if constexpr (std::is_same_v<T, ReferencedTimeSpan>) {
          attribute_into(out, "xlink:href", s.uri);
          attribute_into(out, "start", format_number(s.start));
          attribute_into(out, "end", format_number(s.end));
        }
      },
      scope);
}

inline const InlineText *inline_text(const Scope &scope) {
  return std::get_if<InlineText>(&scope);
}

inline void emotion_into(std::string &out, const EmotionAnnotation &a) {
  out += "<emotion";
  if (a.category)
    attribute_into(out, "category", *a.category);
  std::map<std::string_view, double> descriptors;
  for (const auto &[k, v] : a.dimensions)
    descriptors.emplace(k, v);
  for (const auto &[k, v] : a.appraisals)
    descriptors.emplace(k, v);
  for (const auto &[k, v] : descriptors)
    attribute_into(out, k, format_number(v));
  if (a.intensity)
    attribute_into(out, "intensity", format_number(*a.intensity));
  if (a.probability)
    attribute_into(out, "probability", format_number(*a.probability));
  for (const auto &[reg, v] : a.regulation)
    attribute_into(out, regulation_name(reg), format_number(v));
  if (a.modality)
    attribute_into(out, "modality", *a.modality);
  scope_attributes_into(out, a.scope);
  if (const auto *text = inline_text(a.scope)) {
    out += '>';
    escape_into(out, text->text, false);
    out += "</emotion>";
  } else {
    out += "/>";
  }
}

} // namespace detail

/// Reads an EARL document or fragment. `emotion` and `complex-emotion`
/// elements are collected in document order wherever they appear; any other
/// element is treated as a transparent container.
inline ParsedDocument
parse_document(std::string_view input,
               const VocabularyProfile &profile = VocabularyProfile::standard()) {
  ParsedDocument result;
  auto nodes = detail::read_xml(input);
  detail::EarlBuilder(profile, result.warnings)
      .walk(nodes, result.document, true);
  return result;
}

/// Canonical, byte-stable rendering. Attribute order: category, descriptors
/// (alphabetical), intensity, probability, regulation (alphabetical),
/// modality, then scope.
inline std::string serialize_document(const AnnotationDocument &doc) {
  std::string out = "<";
  out += root_element;
  detail::attribute_into(out, "xmlns:xlink", xlink_namespace);
  if (doc.source_uri)
    detail::attribute_into(out, "source", *doc.source_uri);
  if (doc.items.empty()) {
    out += "/>\n";
    return out;
  }
  out += ">\n";
  for (const auto &item : doc.items) {
    out += "  ";
    if (const auto *a = std::get_if<EmotionAnnotation>(&item)) {
      detail::emotion_into(out, *a);
    } else {
      const auto &c = std::get<ComplexEmotion>(item);
      out += "<complex-emotion";
      detail::scope_attributes_into(out, c.scope);
      out += '>';
      if (const auto *text = detail::inline_text(c.scope)) {
        // Indentation would become part of the text; keep it on one line.
        detail::escape_into(out, text->text, false);
        for (const auto &a : c.constituents)
          detail::emotion_into(out, a);
      } else {
        out += '\n';
        for (const auto &a : c.constituents) {
          out += "    ";
          detail::emotion_into(out, a);
          out += '\n';
        }
        out += "  ";
      }
      out += "</complex-emotion>";
    }
    out += '\n';
  }
  out += "</";
  out += root_element;
  out += ">\n";
  return out;
}

inline ValidationReport validate_document(const AnnotationDocument &doc,
                                          const VocabularyProfile &profile) {
  ValidationReport report;
  for (std::size_t i = 0; i < doc.items.size(); ++i)
    report.merge(validate_annotation(doc.items[i], profile,
                                     "item[" + std::to_string(i) + "]"));
  return report;
}

inline std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Profile file: any root element whose children are `category`,
/// `dimension`, `appraisal` or `modality` elements holding one label each
/// (as text or as a `name` attribute). `strict="true"` on the root opts in
/// to strict mode.
inline VocabularyProfile parse_profile(std::string_view input) {
  auto nodes = detail::read_xml(input);
  const detail::XmlNode *root = nullptr;
  for (const auto &n : nodes) {
    if (n.is_text)
      continue;
    if (root)
      throw Error(Errc::malformed_profile, "more than one root element");
    root = &n;
  }
  if (!root)
    throw Error(Errc::malformed_profile, "no root element");
  VocabularyProfile profile;
  if (const auto *strict = root->attribute("strict"))
    profile.strict = *strict == "true" || *strict == "1";
  for (const auto &child : root->children) {
    if (child.is_text)
      continue;
    std::string label;
    if (const auto *name = child.attribute("name"))
      label = *name;
    else
      for (const auto &t : child.children)
        if (t.is_text)
          label += t.text;
    label = std::string(detail::trim(label));
    const std::string where = "line " + std::to_string(child.line);
    if (label.empty())
      throw Error(Errc::malformed_profile, where + ": empty label");
    std::set<std::string> *set = nullptr;
    if (child.name == "category") set = &profile.categories;
    else if (child.name == "dimension") set = &profile.dimension_names;
    else if (child.name == "appraisal") set = &profile.appraisal_names;
    else if (child.name == "modality") set = &profile.modalities;
    else
      throw Error(Errc::malformed_profile,
                  where + ": unexpected <" + child.name + ">");
    if ((set == &profile.dimension_names || set == &profile.appraisal_names) &&
        !is_descriptor_name(label))
      throw Error(Errc::malformed_profile,
                  where + ": '" + label + "' is not a usable attribute name");
    if (!set->insert(label).second)
      throw Error(Errc::malformed_profile,
                  where + ": duplicate " + child.name + " '" + label + "'");
  }
  for (const auto &d : profile.dimension_names)
    if (profile.appraisal_names.contains(d))
      throw Error(Errc::malformed_profile,
                  "'" + d + "' listed as both dimension and appraisal");
  return profile;
}

struct TextSegment {
  std::string text;
  bool operator==(const TextSegment &) const = default;
};
struct MediaObject {
  std::string uri;
  bool exists = false;
  bool operator==(const MediaObject &) const = default;
};
/// `uri` is empty for a time span over the annotated recording itself.
struct ClipSegment {
  std::string uri;
  double start = 0.0;
  double end = 0.0;
  bool exists = false;
  bool operator==(const ClipSegment &) const = default;
};

using ScopeTarget = std::variant<TextSegment, MediaObject, ClipSegment>;

namespace detail {

inline bool is_remote(std::string_view uri) {
  return uri.find("://") != std::string_view::npos;
}

/// Existence of a corpus-relative reference; throws PATH_ESCAPE when the
/// reference leaves the corpus root.
inline bool locate_in_corpus(const std::string &uri,
                             const std::filesystem::path &corpus_root) {
  namespace fs = std::filesystem;
  if (is_remote(uri))
    return false;
  std::string local = uri.substr(0, uri.find('#'));
  if (local.empty())
    return false; // same-document node reference
  fs::path rel(local);
  if (rel.is_absolute())
    throw Error(Errc::path_escape, "'" + uri + "' is an absolute path");
  std::error_code ec;
  fs::path root = fs::weakly_canonical(corpus_root, ec);
  if (ec)
    root = corpus_root.lexically_normal();
  fs::path target = fs::weakly_canonical(root / rel, ec);
  if (ec)
    target = (root / rel).lexically_normal();
  fs::path inside = target.lexically_relative(root);
  if (inside.empty() || *inside.begin() == "..")
    throw Error(Errc::path_escape,
                "'" + uri + "' resolves outside " + corpus_root.string());
  return fs::exists(target, ec);
}

} // namespace detail

inline ScopeTarget resolve_scope(const Scope &scope,
                                 const std::filesystem::path &corpus_root) {
  return std::visit(
      [&](const auto &s) -> ScopeTarget {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Unscoped>) {
          throw Error(Errc::unscoped, "annotation has no scope");
        } else if constexpr (std::is_same_v<T, InlineText>) {
          return TextSegment{s.text};
        } else if constexpr (std::is_same_v<T, Reference>) {
          return MediaObject{s.uri,
                             detail::locate_in_corpus(s.uri, corpus_root)};
        } else if constexpr (std::is_same_v<T, TimeSpan>) {
          return ClipSegment{"", s.start, s.end, false};
        } else {
          return ClipSegment{s.uri, s.start, s.end,
                             detail::locate_in_corpus(s.uri, corpus_root)};
        }
      },
      scope);
}

inline ScopeTarget resolve_scope(const Item &item,
                                 const std::filesystem::path &corpus_root) {
  return resolve_scope(scope_of(item), corpus_root);
}

} // namespace earl

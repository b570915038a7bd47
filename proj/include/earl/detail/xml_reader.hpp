#pragma once

// Minimal non-validating XML reader: elements, attributes, character data,
// CDATA, comments, processing instructions and a DOCTYPE without internal
// subset. Input may be a fragment with several top-level elements.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "earl/detail/number.hpp"
#include "earl/error.hpp"

namespace earl::detail {

struct XmlNode {
  bool is_text = false;
  std::string name; // element name, empty for text
  std::string text; // decoded character data for text nodes
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  std::size_t line = 0;

  const std::string *attribute(std::string_view key) const {
    for (const auto &[k, v] : attributes)
      if (k == key)
        return &v;
    return nullptr;
  }
};

class XmlReader {
public:
  explicit XmlReader(std::string_view input) : in_(input) {}

  /// Top-level nodes in document order (text between them included).
  std::vector<XmlNode> read() {
    if (in_.starts_with("\xEF\xBB\xBF"))
      pos_ = 3;
    std::vector<XmlNode> nodes;
    parse_content(nodes, nullptr);
    return nodes;
  }

private:
  std::string_view in_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;

  [[noreturn]] void fail(const std::string &what) const {
    throw Error(Errc::malformed_xml, "line " + std::to_string(line_) + ": " + what);
  }

  bool at_end() const { return pos_ >= in_.size(); }
  bool looking_at(std::string_view s) const {
    return in_.substr(pos_).starts_with(s);
  }
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < in_.size(); ++i, ++pos_)
      if (in_[pos_] == '\n')
        ++line_;
  }
  void skip_space() {
    while (!at_end() && is_space(in_[pos_]))
      advance(1);
  }
  void expect(std::string_view s) {
    if (!looking_at(s))
      fail("expected '" + std::string(s) + "'");
    advance(s.size());
  }
  void skip_past(std::string_view terminator, const char *what) {
    auto found = in_.find(terminator, pos_);
    if (found == std::string_view::npos)
      fail(std::string("unterminated ") + what);
    advance(found + terminator.size() - pos_);
  }

  static bool name_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
           c == ':' || c >= 0x80;
  }
  static bool name_char(unsigned char c) {
    return name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
  }

  std::string parse_name() {
    if (at_end() || !name_start(static_cast<unsigned char>(in_[pos_])))
      fail("expected a name");
    std::size_t start = pos_;
    while (!at_end() && name_char(static_cast<unsigned char>(in_[pos_])))
      advance(1);
    return std::string(in_.substr(start, pos_ - start));
  }

  static void append_utf8(std::string &out, std::uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  // Called with pos_ on '&'.
  void parse_reference(std::string &out) {
    auto semi = in_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12)
      fail("unterminated entity reference");
    std::string_view ref = in_.substr(pos_ + 1, semi - pos_ - 1);
    if (ref == "lt") out += '<';
    else if (ref == "gt") out += '>';
    else if (ref == "amp") out += '&';
    else if (ref == "quot") out += '"';
    else if (ref == "apos") out += '\'';
    else if (ref.starts_with('#')) {
      bool hex = ref.size() > 1 && ref[1] == 'x';
      std::string_view digits = ref.substr(hex ? 2 : 1);
      if (digits.empty())
        fail("empty character reference");
      std::uint32_t cp = 0;
      for (char c : digits) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else fail("bad character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
        if (cp > 0x10FFFF)
          fail("character reference out of range");
      }
      if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF))
        fail("invalid character reference");
      append_utf8(out, cp);
    } else {
      fail("unknown entity '&" + std::string(ref) + ";'");
    }
    advance(semi + 1 - pos_);
  }

  std::string parse_attribute_value() {
    if (at_end() || (in_[pos_] != '"' && in_[pos_] != '\''))
      fail("attribute value must be quoted");
    char quote = in_[pos_];
    advance(1);
    std::string value;
    while (true) {
      if (at_end())
        fail("unterminated attribute value");
      char c = in_[pos_];
      if (c == quote) {
        advance(1);
        return value;
      }
      if (c == '<')
        fail("'<' in attribute value");
      if (c == '&') {
        parse_reference(value);
        continue;
      }
      value += c;
      advance(1);
    }
  }

  void parse_element(std::vector<XmlNode> &siblings) {
    XmlNode node;
    node.line = line_;
    expect("<");
    node.name = parse_name();
    while (true) {
      bool had_space = !at_end() && is_space(in_[pos_]);
      skip_space();
      if (at_end())
        fail("unterminated start tag <" + node.name + ">");
      if (looking_at("/>")) {
        advance(2);
        siblings.push_back(std::move(node));
        return;
      }
      if (in_[pos_] == '>') {
        advance(1);
        break;
      }
      if (!had_space)
        fail("missing whitespace before attribute in <" + node.name + ">");
      std::string key = parse_name();
      skip_space();
      expect("=");
      skip_space();
      std::string value = parse_attribute_value();
      if (node.attribute(key))
        fail("duplicate attribute '" + key + "' on <" + node.name + ">");
      node.attributes.emplace_back(std::move(key), std::move(value));
    }
    parse_content(node.children, &node);
    siblings.push_back(std::move(node));
  }

  // Reads children until the matching end tag (or end of input at top level).
  void parse_content(std::vector<XmlNode> &out, const XmlNode *parent) {
    std::string text;
    std::size_t text_line = line_;
    auto flush_text = [&] {
      if (!text.empty()) {
        XmlNode t;
        t.is_text = true;
        t.text = std::move(text);
        t.line = text_line;
        out.push_back(std::move(t));
        text.clear();
      }
    };
    while (true) {
      if (at_end()) {
        if (parent)
          fail("missing </" + parent->name + ">");
        flush_text();
        return;
      }
      char c = in_[pos_];
      if (c == '<') {
        if (looking_at("</")) {
          if (!parent)
            fail("unexpected end tag");
          advance(2);
          std::string name = parse_name();
          skip_space();
          expect(">");
          if (name != parent->name)
            fail("</" + name + "> does not close <" + parent->name + ">");
          flush_text();
          return;
        }
        if (looking_at("<!--")) {
          skip_past("-->", "comment");
          continue;
        }
        if (looking_at("<![CDATA[")) {
          if (text.empty())
            text_line = line_;
          advance(9);
          auto end = in_.find("]]>", pos_);
          if (end == std::string_view::npos)
            fail("unterminated CDATA section");
          text.append(in_.substr(pos_, end - pos_));
          advance(end + 3 - pos_);
          continue;
        }
        if (looking_at("<?")) {
          skip_past("?>", "processing instruction");
          continue;
        }
        if (looking_at("<!DOCTYPE")) {
          if (parent)
            fail("DOCTYPE inside an element");
          auto close = in_.find('>', pos_);
          auto bracket = in_.find('[', pos_);
          if (bracket != std::string_view::npos && bracket < close)
            fail("DOCTYPE internal subsets are not supported");
          skip_past(">", "DOCTYPE");
          continue;
        }
        flush_text();
        parse_element(out);
        text_line = line_;
        continue;
      }
      if (text.empty())
        text_line = line_;
      if (c == '&') {
        parse_reference(text);
        continue;
      }
      if (c == '>' && text.ends_with("]]"))
        fail("']]>' in character data");
      text += c;
      advance(1);
    }
  }
};

inline std::vector<XmlNode> read_xml(std::string_view input) {
  return XmlReader(input).read();
}

} // namespace earl::detail

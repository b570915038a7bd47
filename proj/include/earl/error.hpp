#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace earl {

enum class Errc {
  malformed_xml,
  unparseable_number,
  start_after_end,
  incomplete_time_span,
  nested_complex,
  unscoped,
  path_escape,
  unknown_emotion,
  unknown_source,
  duplicate_marker,
  empty_emotion,
  malformed_lexicon,
  malformed_profile,
  malformed_features,
  malformed_config,
  malformed_policy,
  malformed_evidence,
  unavailable_evidence,
  time_regression,
  no_signal,
};

constexpr std::string_view code_name(Errc code) noexcept {
  switch (code) {
  case Errc::malformed_xml: return "MALFORMED_XML";
  case Errc::unparseable_number: return "UNPARSEABLE_NUMBER";
  case Errc::start_after_end: return "START_AFTER_END";
  case Errc::incomplete_time_span: return "INCOMPLETE_TIME_SPAN";
  case Errc::nested_complex: return "NESTED_COMPLEX";
  case Errc::unscoped: return "UNSCOPED";
  case Errc::path_escape: return "PATH_ESCAPE";
  case Errc::unknown_emotion: return "UNKNOWN_EMOTION";
  case Errc::unknown_source: return "UNKNOWN_SOURCE";
  case Errc::duplicate_marker: return "DUPLICATE_MARKER";
  case Errc::empty_emotion: return "EMPTY_EMOTION";
  case Errc::malformed_lexicon: return "MALFORMED_LEXICON";
  case Errc::malformed_profile: return "MALFORMED_PROFILE";
  case Errc::malformed_features: return "MALFORMED_FEATURES";
  case Errc::malformed_config: return "MALFORMED_CONFIG";
  case Errc::malformed_policy: return "MALFORMED_POLICY";
  case Errc::malformed_evidence: return "MALFORMED_EVIDENCE";
  case Errc::unavailable_evidence: return "UNAVAILABLE_EVIDENCE";
  case Errc::time_regression: return "TIME_REGRESSION";
  case Errc::no_signal: return "NO_SIGNAL";
  }
  return "UNKNOWN";
}

/// Thrown by every operation that can fail; `code()` is the stable,
/// machine-checkable part, `what()` carries "<CODE>: <detail>".
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &detail)
      : std::runtime_error(std::string(code_name(code)) + ": " + detail),
        code_(code), detail_(detail) {}

  Errc code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string &detail() const noexcept { return detail_; }

private:
  Errc code_;
  std::string detail_;
};

} // namespace earl

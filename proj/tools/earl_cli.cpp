// earl: command-line front end for EARL corpora, marker classification,
// evidence fusion and access decisions.
//
// Exit status: 0 ok / allow, 1 usage error, 2 input or parse error,
// 3 access denied.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "earl/earl.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_input = 2;
constexpr int exit_deny = 3;

earl::VocabularyProfile load_profile_or_default(const std::string &path,
                                                bool strict) {
  earl::VocabularyProfile profile =
      path.empty() ? earl::VocabularyProfile::standard()
                   : earl::parse_profile(earl::read_file(path));
  if (strict)
    profile.strict = true;
  return profile;
}

earl::FusionConfig load_config_or_default(const std::string &path) {
  if (path.empty())
    return {};
  return earl::load_fusion_config(earl::read_file(path));
}

earl::FusedEstimate fuse_file(const std::string &evidence_path,
                              const std::string &config_path,
                              std::optional<double> at) {
  const auto cfg = load_config_or_default(config_path);
  const auto stream = earl::load_evidence_stream(
      earl::read_file(evidence_path), fs::path(evidence_path).parent_path());
  return earl::fuse_stream(stream, cfg, at);
}

int run_validate(const std::string &path, const std::string &profile_path,
                 bool strict) {
  const auto profile = load_profile_or_default(profile_path, strict);
  const auto files = earl::collect_xml_files(path);
  std::size_t errors = 0, warnings = 0;
  for (const auto &file : files) {
    const auto name = earl::display_name(file, path);
    auto print = [&](const earl::Finding &f) {
      std::cerr << name << ": " << earl::severity_name(f.severity) << ' '
                << f.code << ": " << f.message;
      if (!f.location.empty())
        std::cerr << " [" << f.location << ']';
      std::cerr << '\n';
      (f.severity == earl::Severity::error ? errors : warnings) += 1;
    };
    try {
      auto parsed = earl::parse_document(earl::read_file(file), profile);
      for (const auto &w : parsed.warnings)
        print(w);
      for (const auto &f :
           earl::validate_document(parsed.document, profile).findings)
        print(f);
    } catch (const earl::Error &e) {
      print({earl::Severity::error, std::string(earl::code_name(e.code())),
             e.detail(), ""});
    }
  }
  std::cerr << files.size() << " file(s), " << errors << " error(s), "
            << warnings << " warning(s)\n";
  return errors == 0 ? exit_ok : exit_input;
}

int run_annotate(const std::string &text, const std::string &lexicon_path) {
  const earl::Lexicon lexicon =
      lexicon_path.empty() ? earl::default_lexicon()
                           : earl::load_lexicon(earl::read_file(lexicon_path));
  earl::AnnotationDocument doc;
  for (auto &match : earl::tag_lexical(text, lexicon))
    doc.items.emplace_back(std::move(match.annotation));
  std::cout << earl::serialize_document(doc);
  return exit_ok;
}

int run_classify(const std::string &voice, const std::string &movement) {
  earl::RankedEmotions ranked =
      !voice.empty()
          ? earl::classify_voice(earl::parse_voice_features(earl::read_file(voice)))
          : earl::classify_movement(
                earl::parse_movement_features(earl::read_file(movement)));
  for (const auto &r : ranked) {
    std::cout << r.label << '\t' << earl::detail::format_number(r.score) << '\t';
    if (r.matched_features.empty())
      std::cout << '-';
    for (std::size_t i = 0; i < r.matched_features.size(); ++i)
      std::cout << (i ? "," : "") << r.matched_features[i];
    std::cout << '\n';
  }
  return exit_ok;
}

int run_fuse(const std::string &evidence, const std::string &config,
             std::optional<double> at) {
  const auto cfg = load_config_or_default(config);
  const auto fused = fuse_file(evidence, config, at);
  earl::AnnotationDocument doc;
  doc.items.push_back(earl::to_complex_emotion(fused, earl::Unscoped{}, cfg));
  std::cout << earl::serialize_document(doc);
  if (fused.ambiguous)
    std::cerr << "note: estimate is ambiguous\n";
  return exit_ok;
}

int run_decide(const std::string &evidence, const std::string &resource,
               const std::string &policy_path, const std::string &config,
               std::optional<double> at) {
  const auto policy = earl::load_policy(earl::read_file(policy_path));
  const auto fused = fuse_file(evidence, config, at);
  const auto decision = earl::decide_access(fused, resource, policy);
  const bool deny = decision.verdict == earl::Verdict::deny;
  std::cerr << (deny ? "deny: " : "allow: ") << decision.rationale << '\n';
  return deny ? exit_deny : exit_ok;
}

int run_stats(const std::string &path, bool json,
              const std::string &profile_path) {
  const auto profile = load_profile_or_default(profile_path, false);
  const auto report = earl::corpus_report(earl::collect_xml_files(path), profile);
  if (json) {
    nlohmann::ordered_json j;
    j["files_scanned"] = report.files_scanned;
    j["annotations_count"] = report.annotations_count;
    j["complex_count"] = report.complex_count;
    j["error_count"] = report.error_count;
    j["categories"] = nlohmann::ordered_json::object();
    for (const auto &[category, n] : report.histogram)
      j["categories"][category] = n;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "files_scanned\t" << report.files_scanned << '\n'
              << "annotations_count\t" << report.annotations_count << '\n'
              << "complex_count\t" << report.complex_count << '\n'
              << "error_count\t" << report.error_count << '\n';
    for (const auto &[category, n] : report.histogram)
      std::cout << "category." << category << '\t' << n << '\n';
  }
  return exit_ok;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"EARL emotion annotation toolkit", "earl"};
  app.require_subcommand(1);

  std::string path, profile, text, lexicon, voice, movement, evidence, config,
      resource, policy;
  bool strict = false, json = false;
  std::optional<double> at;

  auto *validate = app.add_subcommand("validate", "Parse and validate every .xml file under a path");
  validate->add_option("path", path, "File or directory")->required();
  validate->add_option("--profile", profile, "Vocabulary profile XML");
  validate->add_flag("--strict", strict, "Empty profile sets accept nothing");

  auto *annotate = app.add_subcommand("annotate", "Tag text with lexical emotion markers");
  annotate->add_option("--text", text, "Text to annotate")->required();
  annotate->add_option("--lexicon", lexicon, "Lexicon file (default: built-in)");

  auto *classify = app.add_subcommand("classify", "Rank emotions for a voice or movement feature file");
  auto *voice_opt = classify->add_option("--voice", voice, "Voice feature file");
  auto *movement_opt = classify->add_option("--movement", movement, "Movement feature file");
  voice_opt->excludes(movement_opt);
  classify->require_option(1);

  auto *fuse = app.add_subcommand("fuse", "Fuse an evidence stream into EARL output");
  fuse->add_option("--evidence", evidence, "Evidence stream file")->required();
  fuse->add_option("--config", config, "Fusion config (key=value)");
  fuse->add_option("--at", at, "Query time in seconds (default: last observation)");

  auto *decide = app.add_subcommand("decide", "Access decision for a resource (exit 3 = deny)");
  decide->add_option("--evidence", evidence, "Evidence stream file")->required();
  decide->add_option("--resource", resource, "Resource tag")->required();
  decide->add_option("--policy", policy, "Policy file")->required();
  decide->add_option("--config", config, "Fusion config (key=value)");
  decide->add_option("--at", at, "Query time in seconds (default: last observation)");

  auto *stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("path", path, "File or directory")->required();
  stats->add_flag("--json", json, "Emit a single JSON object");
  stats->add_option("--profile", profile, "Vocabulary profile XML");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*validate)
      return run_validate(path, profile, strict);
    if (*annotate)
      return run_annotate(text, lexicon);
    if (*classify)
      return run_classify(voice, movement);
    if (*fuse)
      return run_fuse(evidence, config, at);
    if (*decide)
      return run_decide(evidence, resource, policy, config, at);
    if (*stats)
      return run_stats(path, json, profile);
  } catch (const earl::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const std::runtime_error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  }
  return exit_usage;
}

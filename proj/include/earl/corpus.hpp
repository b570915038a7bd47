#pragma once

// Corpus-level helpers: file discovery and summary statistics.

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "earl/document.hpp"
#include "earl/error.hpp"

namespace earl {

/// `.xml` files under `root` (or `root` itself if it is a file), sorted.
inline std::vector<std::filesystem::path>
collect_xml_files(const std::filesystem::path &root) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_regular_file(root)) {
    files.push_back(root);
    return files;
  }
  if (!fs::is_directory(root))
    throw std::runtime_error("no such file or directory: " + root.string());
  for (const auto &entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file() && entry.path().extension() == ".xml")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

/// How a file is named in reports: relative to the scanned directory.
inline std::string display_name(const std::filesystem::path &file,
                                const std::filesystem::path &root) {
  if (std::filesystem::is_directory(root))
    return file.lexically_relative(root).generic_string();
  return file.filename().generic_string();
}

inline constexpr std::string_view uncategorized_bucket = "(uncategorized)";

struct CorpusReport {
  std::size_t files_scanned = 0;
  std::size_t annotations_count = 0; // every <emotion>, constituents included
  std::size_t complex_count = 0;
  std::size_t error_count = 0; // parse failures + validation errors
  std::map<std::string, std::size_t> histogram;

  bool operator==(const CorpusReport &) const = default;
};

inline void count_into(CorpusReport &report, const AnnotationDocument &doc) {
  auto count = [&](const EmotionAnnotation &a) {
    ++report.annotations_count;
    ++report.histogram[a.category.value_or(std::string(uncategorized_bucket))];
  };
  for (const auto &item : doc.items) {
    if (const auto *a = std::get_if<EmotionAnnotation>(&item)) {
      count(*a);
    } else {
      ++report.complex_count;
      for (const auto &a : std::get<ComplexEmotion>(item).constituents)
        count(a);
    }
  }
}

inline CorpusReport
corpus_report(const std::vector<std::filesystem::path> &files,
              const VocabularyProfile &profile = VocabularyProfile::standard()) {
  CorpusReport report;
  for (const auto &file : files) {
    ++report.files_scanned;
    try {
      auto parsed = parse_document(read_file(file), profile);
      count_into(report, parsed.document);
      report.error_count += validate_document(parsed.document, profile).error_count();
    } catch (const Error &) {
      ++report.error_count;
    }
  }
  return report;
}

} // namespace earl

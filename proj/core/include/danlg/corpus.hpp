#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "danlg/mr.hpp"

namespace danlg {

struct CorpusSample {
  MeaningRepresentation mr;
  std::string text;
  std::size_t sample_id = 0;
};

enum class CorpusFormat { kAuto, kCsvMrRef, kJsonl, kTsv };

std::string_view to_string(CorpusFormat format);
/// Accepts "auto", "csv", "csv-mr-ref", "jsonl", "tsv".
CorpusFormat parse_corpus_format(std::string_view name);

struct Corpus {
  std::string name;
  std::vector<CorpusSample> samples;
  CorpusFormat source_format = CorpusFormat::kJsonl;

  std::size_t size() const noexcept { return samples.size(); }
};

/// Loads one corpus file. sample_id is the 0-based data-row index (header and
/// blank lines are not data rows). Format kAuto picks by extension, then by
/// sniffing the first non-empty line.
///
/// Throws Error(kIo) when the file cannot be read and FormatError (carrying
/// the row) for malformed rows, including rows whose MR does not parse.
Corpus load_corpus(const std::filesystem::path& path,
                   CorpusFormat format = CorpusFormat::kAuto);

/// Same as load_corpus but over an in-memory buffer; `name` becomes the
/// corpus name. kAuto sniffs the content.
Corpus parse_corpus(std::string_view content, CorpusFormat format,
                    std::string name);

/// Concatenates several files into one corpus, renumbering sample ids in
/// file order. Used for distributions split into train/valid/test files.
Corpus load_corpus_files(const std::vector<std::filesystem::path>& paths,
                         CorpusFormat format = CorpusFormat::kAuto);

/// Canonical JSONL interchange: {"mr": <canonical render>, "text": ...}.
void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);

/// RFC 4180 CSV reader: quoted fields, doubled quotes, embedded newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view content);
/// Quotes a field when it holds a comma, quote or line break.
std::string csv_escape(std::string_view field);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace danlg

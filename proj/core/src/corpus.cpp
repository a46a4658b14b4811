#include "danlg/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "danlg/error.hpp"
#include "danlg/text.hpp"

namespace danlg {
namespace {

using nlohmann::json;

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) extra = 0;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2) extra = 1;
    else if ((c & 0xF0) == 0xE0) extra = 2;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) extra = 3;
    else return false;
    if (i + extra >= s.size() && extra > 0) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

CorpusSample make_sample(std::string_view mr_text, std::string_view text,
                         std::size_t row) {
  if (!valid_utf8(mr_text) || !valid_utf8(text)) {
    throw FormatError(row, "invalid UTF-8");
  }
  const std::string_view sentence = trim(text);
  if (sentence.empty()) throw FormatError(row, "empty sentence");
  try {
    return CorpusSample{parse_mr(mr_text), std::string(sentence), row};
  } catch (const MalformedMr& e) {
    throw FormatError(row, std::string("unparseable MR: ") + e.what());
  }
}

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

CorpusFormat sniff(std::string_view content) {
  for (std::string_view line : split_lines(content)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '{') return CorpusFormat::kJsonl;
    if (line.find('\t') != std::string_view::npos) return CorpusFormat::kTsv;
    return CorpusFormat::kCsvMrRef;
  }
  return CorpusFormat::kJsonl;
}

bool is_mr_header(std::string_view cell) {
  const std::string c = lower_ascii(trim(cell));
  return c == "mr" || c == "meaning_representation";
}

bool is_text_header(std::string_view cell) {
  const std::string c = lower_ascii(trim(cell));
  return c == "ref" || c == "text" || c == "target" || c == "reference" ||
         c == "sentence" || c == "utterance";
}

std::vector<CorpusSample> parse_csv_rows(std::string_view content) {
  auto rows = parse_csv(content);
  std::size_t mr_col = 0;
  std::size_t text_col = 1;
  std::size_t first = 0;
  if (!rows.empty()) {
    const auto& header = rows.front();
    std::optional<std::size_t> m, t;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (!m && is_mr_header(header[i])) m = i;
      else if (!t && is_text_header(header[i])) t = i;
    }
    if (m) {
      mr_col = *m;
      text_col = t.value_or(mr_col == 0 ? 1 : 0);
      first = 1;
    }
  }
  std::vector<CorpusSample> samples;
  std::size_t row = 0;
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() == 1 && trim(cells[0]).empty()) continue;
    if (cells.size() <= std::max(mr_col, text_col)) {
      throw FormatError(row, "expected at least " +
                                 std::to_string(std::max(mr_col, text_col) + 1) +
                                 " columns");
    }
    samples.push_back(make_sample(cells[mr_col], cells[text_col], row));
    ++row;
  }
  return samples;
}

std::vector<CorpusSample> parse_jsonl_rows(std::string_view content) {
  std::vector<CorpusSample> samples;
  std::size_t row = 0;
  for (std::string_view line : split_lines(content)) {
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(row, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("mr") || !obj["mr"].is_string() ||
        !obj.contains("text") || !obj["text"].is_string()) {
      throw FormatError(row, "expected object with string fields mr and text");
    }
    samples.push_back(make_sample(obj["mr"].get_ref<const std::string&>(),
                                  obj["text"].get_ref<const std::string&>(),
                                  row));
    ++row;
  }
  return samples;
}

std::vector<CorpusSample> parse_tsv_rows(std::string_view content) {
  std::vector<CorpusSample> samples;
  std::size_t row = 0;
  bool first_line = true;
  for (std::string_view line : split_lines(content)) {
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (first_line) {
      first_line = false;
      if (tab != std::string_view::npos && is_mr_header(line.substr(0, tab))) {
        continue;
      }
    }
    if (tab == std::string_view::npos) throw FormatError(row, "missing TAB");
    samples.push_back(make_sample(line.substr(0, tab), line.substr(tab + 1), row));
    ++row;
  }
  return samples;
}

}  // namespace

std::string_view to_string(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kAuto: return "auto";
    case CorpusFormat::kCsvMrRef: return "csv-mr-ref";
    case CorpusFormat::kJsonl: return "jsonl";
    case CorpusFormat::kTsv: return "tsv";
  }
  return "auto";
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "auto") return CorpusFormat::kAuto;
  if (name == "csv" || name == "csv-mr-ref") return CorpusFormat::kCsvMrRef;
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "tsv") return CorpusFormat::kTsv;
  throw Error(ErrorCode::kConfig, "unknown corpus format '" + std::string(name) + "'");
}

std::vector<std::vector<std::string>> parse_csv(std::string_view content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        break;
      case '\r': break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        any = false;
        break;
      default: field.push_back(c);
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

Corpus parse_corpus(std::string_view content, CorpusFormat format,
                    std::string name) {
  if (format == CorpusFormat::kAuto) format = sniff(content);
  Corpus corpus;
  corpus.name = std::move(name);
  corpus.source_format = format;
  switch (format) {
    case CorpusFormat::kCsvMrRef: corpus.samples = parse_csv_rows(content); break;
    case CorpusFormat::kTsv: corpus.samples = parse_tsv_rows(content); break;
    default: corpus.samples = parse_jsonl_rows(content); break;
  }
  if (corpus.samples.empty()) throw FormatError(0, "corpus has no data rows");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  const std::string content = read_file(path);
  if (format == CorpusFormat::kAuto) {
    const std::string ext = lower_ascii(path.extension().string());
    if (ext == ".csv") format = CorpusFormat::kCsvMrRef;
    else if (ext == ".jsonl" || ext == ".json") format = CorpusFormat::kJsonl;
    else if (ext == ".tsv") format = CorpusFormat::kTsv;
  }
  try {
    return parse_corpus(content, format, path.stem().string());
  } catch (const FormatError& e) {
    throw FormatError(e.row(), path.string() + ": " + e.reason());
  }
}

Corpus load_corpus_files(const std::vector<std::filesystem::path>& paths,
                         CorpusFormat format) {
  if (paths.empty()) throw Error(ErrorCode::kConfig, "no corpus files given");
  Corpus merged;
  for (const auto& path : paths) {
    Corpus part = load_corpus(path, format);
    if (merged.samples.empty()) {
      merged.name = part.name;
      merged.source_format = part.source_format;
    }
    for (auto& sample : part.samples) {
      sample.sample_id = merged.samples.size();
      merged.samples.push_back(std::move(sample));
    }
  }
  if (paths.size() > 1) merged.name = paths.front().parent_path().filename().string();
  return merged;
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& sample : corpus.samples) {
    json row = json::object();
    row["mr"] = render_mr(sample.mr);
    row["text"] = sample.text;
    out << row.dump() << '\n';
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read '" + path.string() + "'");
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to '" + path.string() + "'");
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace danlg

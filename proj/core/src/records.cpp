#include "danlg/records.hpp"

#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "danlg/corpus.hpp"
#include "danlg/error.hpp"
#include "danlg/text.hpp"

namespace danlg {
namespace {

using nlohmann::json;

constexpr int kAnyRun = -1;

template <typename Fn>
void for_each_row(std::string_view content, Fn&& fn) {
  std::size_t row = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    const std::string_view line = trim(content.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(row, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw FormatError(row, "expected a JSON object");
    try {
      fn(obj, row);
    } catch (const json::exception& e) {
      throw FormatError(row, e.what());
    }
    ++row;
  }
}

const json& field(const json& obj, const char* name, std::size_t row) {
  auto it = obj.find(name);
  if (it == obj.end()) throw FormatError(row, std::string("missing field '") + name + "'");
  return *it;
}

std::string canonical_key(const std::string& key, std::size_t row) {
  try {
    return render_mr(parse_mr(key));
  } catch (const MalformedMr& e) {
    throw FormatError(row, std::string("sample_key is not an MR: ") + e.what());
  }
}

}  // namespace

std::vector<GenerationRecord> parse_generations(std::string_view content) {
  std::vector<GenerationRecord> records;
  for_each_row(content, [&](const json& obj, std::size_t row) {
    GenerationRecord rec;
    rec.sample_key = canonical_key(field(obj, "sample_key", row).get<std::string>(), row);
    try {
      rec.representation =
          parse_prompt_mode(field(obj, "representation", row).get<std::string>());
    } catch (const Error& e) {
      throw FormatError(row, e.what());
    }
    rec.fold = field(obj, "fold", row).get<int>();
    rec.epoch = field(obj, "epoch", row).get<int>();
    if (rec.fold < 0 || rec.fold > 4) throw FormatError(row, "fold must be in 0..4");
    if (rec.epoch < 0) throw FormatError(row, "epoch must be >= 0");
    rec.outputs = field(obj, "outputs", row).get<std::vector<std::string>>();
    records.push_back(std::move(rec));
  });
  return records;
}

std::vector<GenerationRecord> load_generations(const std::filesystem::path& path) {
  try {
    return parse_generations(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(e.row(), path.string() + ": " + e.reason());
  }
}

void write_generations(const std::vector<GenerationRecord>& records, std::ostream& out) {
  for (const auto& rec : records) {
    json row = json::object();
    row["sample_key"] = rec.sample_key;
    row["representation"] = std::string(to_string(rec.representation));
    row["fold"] = rec.fold;
    row["epoch"] = rec.epoch;
    row["outputs"] = rec.outputs;
    out << row.dump() << '\n';
  }
}

EmbeddingTable EmbeddingTable::parse(std::string_view content) {
  EmbeddingTable table;
  for_each_row(content, [&](const json& obj, std::size_t row) {
    auto id = field(obj, "id", row).get<std::string>();
    auto vec = field(obj, "vector", row).get<std::vector<double>>();
    try {
      table.insert(std::move(id), std::move(vec));
    } catch (const Error& e) {
      throw FormatError(row, e.what());
    }
  });
  return table;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

void EmbeddingTable::insert(std::string id, std::vector<double> vector) {
  if (vector.empty()) throw Error(ErrorCode::kFormat, "empty embedding for '" + id + "'");
  if (dimension_ == 0) dimension_ = vector.size();
  if (vector.size() != dimension_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding '" + id + "' has dimension " + std::to_string(vector.size()) +
                    ", expected " + std::to_string(dimension_));
  }
  if (!vectors_.emplace(id, std::move(vector)).second) {
    throw Error(ErrorCode::kFormat, "duplicate embedding id '" + id + "'");
  }
}

const std::vector<double>* EmbeddingTable::find_id(const std::string& id) const {
  auto it = vectors_.find(id);
  return it == vectors_.end() ? nullptr : &it->second;
}

const std::vector<double>& EmbeddingTable::lookup(std::string_view sentence) const {
  const std::string id = sentence_id(sentence);
  if (const auto* v = find_id(id)) return *v;
  throw Error(ErrorCode::kMissingEmbedding,
              "no embedding for sentence '" + std::string(sentence) + "' (id " + id + ")");
}

PairScoreTable PairScoreTable::parse(std::string_view content) {
  PairScoreTable table;
  for_each_row(content, [&](const json& obj, std::size_t row) {
    auto id = field(obj, "id", row).get<std::string>();
    const double score = field(obj, "score", row).get<double>();
    try {
      table.insert(std::move(id), score);
    } catch (const Error& e) {
      throw FormatError(row, e.what());
    }
  });
  return table;
}

PairScoreTable PairScoreTable::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

void PairScoreTable::insert(std::string id, double score) {
  if (!std::isfinite(score)) throw Error(ErrorCode::kFormat, "non-finite pair score");
  if (!scores_.emplace(id, score).second) {
    throw Error(ErrorCode::kFormat, "duplicate pair id '" + id + "'");
  }
}

double PairScoreTable::lookup(std::string_view candidate, std::string_view reference) const {
  const std::string id = pair_id(candidate, reference);
  auto it = scores_.find(id);
  if (it == scores_.end()) {
    throw Error(ErrorCode::kMissingPairScore,
                "no score for pair (" + std::string(candidate) + " | " +
                    std::string(reference) + ") id " + id);
  }
  return it->second;
}

PredictionTable PredictionTable::parse(std::string_view content) {
  PredictionTable table;
  for_each_row(content, [&](const json& obj, std::size_t row) {
    Prediction p;
    p.sample_key = canonical_key(field(obj, "sample_key", row).get<std::string>(), row);
    p.output_index = field(obj, "output_index", row).get<std::size_t>();
    p.predicted = field(obj, "predicted", row).get<std::vector<std::string>>();
    if (auto it = obj.find("representation"); it != obj.end()) {
      try {
        p.representation = parse_prompt_mode(it->get<std::string>());
      } catch (const Error& e) {
        throw FormatError(row, e.what());
      }
    }
    if (auto it = obj.find("epoch"); it != obj.end()) p.epoch = it->get<int>();
    try {
      table.insert(std::move(p));
    } catch (const Error& e) {
      throw FormatError(row, e.what());
    }
  });
  return table;
}

PredictionTable PredictionTable::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

void PredictionTable::insert(Prediction prediction) {
  Key key{prediction.sample_key, prediction.output_index,
          prediction.representation ? static_cast<int>(*prediction.representation) : kAnyRun,
          prediction.epoch.value_or(kAnyRun)};
  if (!index_.emplace(key, rows_.size()).second) {
    throw Error(ErrorCode::kDuplicateRecord,
                "duplicate prediction for '" + prediction.sample_key + "' output " +
                    std::to_string(prediction.output_index));
  }
  rows_.push_back(std::move(prediction));
}

const std::vector<std::string>* PredictionTable::find(const std::string& sample_key,
                                                      std::size_t output_index,
                                                      PromptMode representation,
                                                      int epoch) const {
  const int rep = static_cast<int>(representation);
  for (const Key& key : {Key{sample_key, output_index, rep, epoch},
                         Key{sample_key, output_index, rep, kAnyRun},
                         Key{sample_key, output_index, kAnyRun, epoch},
                         Key{sample_key, output_index, kAnyRun, kAnyRun}}) {
    if (auto it = index_.find(key); it != index_.end()) return &rows_[it->second].predicted;
  }
  return nullptr;
}

void write_predictions(const std::vector<Prediction>& rows, std::ostream& out) {
  for (const auto& p : rows) {
    json row = json::object();
    row["sample_key"] = p.sample_key;
    row["output_index"] = p.output_index;
    row["predicted"] = p.predicted;
    if (p.representation) row["representation"] = std::string(to_string(*p.representation));
    if (p.epoch) row["epoch"] = *p.epoch;
    out << row.dump() << '\n';
  }
}

void write_embeddings(std::span<const std::pair<std::string, std::vector<double>>> rows,
                      std::ostream& out) {
  for (const auto& [id, vector] : rows) out << json{{"id", id}, {"vector", vector}}.dump() << '\n';
}

void write_pair_scores(std::span<const std::pair<std::string, double>> rows, std::ostream& out) {
  for (const auto& [id, score] : rows) out << json{{"id", id}, {"score", score}}.dump() << '\n';
}

}  // namespace danlg

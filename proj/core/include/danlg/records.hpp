#pragma once

// JSONL record types exchanged with generators and external scorers.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "danlg/prompt.hpp"

namespace danlg {

/// K generated sentences for one input MR in one (representation, fold,
/// epoch) cell. Epoch 0 is the untrained (zero-shot) model.
struct GenerationRecord {
  std::string sample_key;  // canonical rendered MR
  PromptMode representation = PromptMode::kBaseline;
  int fold = 0;
  int epoch = 0;
  std::vector<std::string> outputs;
};

/// Reads {sample_key, representation, fold, epoch, outputs:[...]} rows.
/// sample_key is canonicalized through parse_mr/render_mr so any accepted MR
/// syntax joins with the corpus. fold must be in [0, 4], epoch >= 0.
std::vector<GenerationRecord> parse_generations(std::string_view content);
std::vector<GenerationRecord> load_generations(const std::filesystem::path& path);
void write_generations(const std::vector<GenerationRecord>& records, std::ostream& out);

/// {id, vector:[...]} rows; ids are sentence_id() of the embedded text.
class EmbeddingTable {
 public:
  static EmbeddingTable parse(std::string_view content);
  static EmbeddingTable load(const std::filesystem::path& path);

  /// Throws Error(kMissingEmbedding) for an unknown sentence.
  const std::vector<double>& lookup(std::string_view sentence) const;
  const std::vector<double>* find_id(const std::string& id) const;
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return vectors_.size(); }

  void insert(std::string id, std::vector<double> vector);

 private:
  std::unordered_map<std::string, std::vector<double>> vectors_;
  std::size_t dimension_ = 0;
};

/// {id, score} rows; ids are pair_id(candidate, reference).
class PairScoreTable {
 public:
  static PairScoreTable parse(std::string_view content);
  static PairScoreTable load(const std::filesystem::path& path);

  /// Throws Error(kMissingPairScore) for an unknown pair.
  double lookup(std::string_view candidate, std::string_view reference) const;
  std::size_t size() const noexcept { return scores_.size(); }

  void insert(std::string id, double score);

 private:
  std::unordered_map<std::string, double> scores_;
};

/// One DA prediction for one generated output.
struct Prediction {
  std::string sample_key;
  std::size_t output_index = 0;
  std::vector<std::string> predicted;
  // Present when one file covers several runs.
  std::optional<PromptMode> representation;
  std::optional<int> epoch;
};

/// {sample_key, output_index, predicted:[labels]} rows, optionally carrying
/// representation and epoch. Lookups prefer an exact run match and fall back
/// to rows without run fields.
class PredictionTable {
 public:
  static PredictionTable parse(std::string_view content);
  static PredictionTable load(const std::filesystem::path& path);

  void insert(Prediction prediction);
  const std::vector<std::string>* find(const std::string& sample_key,
                                       std::size_t output_index, PromptMode representation,
                                       int epoch) const;
  std::size_t size() const noexcept { return rows_.size(); }
  const std::vector<Prediction>& rows() const noexcept { return rows_; }

 private:
  using Key = std::tuple<std::string, std::size_t, int, int>;
  std::vector<Prediction> rows_;
  std::map<Key, std::size_t> index_;
};

void write_predictions(const std::vector<Prediction>& rows, std::ostream& out);

/// Writers for the files external scorers hand back.
void write_embeddings(std::span<const std::pair<std::string, std::vector<double>>> rows,
                      std::ostream& out);
void write_pair_scores(std::span<const std::pair<std::string, double>> rows, std::ostream& out);

}  // namespace danlg

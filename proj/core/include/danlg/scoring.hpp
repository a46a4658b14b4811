#pragma once

// Three-level aggregation: generation score -> MR score -> run average.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "danlg/corpus_stats.hpp"
#include "danlg/dac.hpp"
#include "danlg/metrics.hpp"
#include "danlg/records.hpp"

namespace danlg {

enum class Metric {
  kBleu,          // native multi-reference BLEU-4
  kBleurt,        // external pair-score file, mean over references
  kLabse,         // cosine of external embeddings, mean over references
  kSlotAccuracy,  // reference-free, against the input MR
  kDac,           // 0/1 exact match of predicted DA(s), from a prediction file
};

std::string_view to_string(Metric metric);
/// Accepts "bleu", "bleurt", "labse", "slot-accuracy" (or "slot_accuracy",
/// "sa"), "dac".
Metric parse_metric(std::string_view name);
std::vector<Metric> all_metrics();

/// Everything a metric may need beyond the generation itself. Pointers are
/// non-owning and only required by the metric that uses them.
struct ScoringResources {
  SmoothingSpec smoothing;
  MatchConvention convention;
  const PairScoreTable* pair_scores = nullptr;
  const EmbeddingTable* embeddings = nullptr;
  const PredictionTable* predictions = nullptr;
  /// Gold label shape for kDac; detected from the reference groups when unset.
  std::optional<DaLabelMode> dac_mode;
  std::size_t outputs_per_mr = 5;
  unsigned jobs = 1;
};

/// Text of the matching convention a metric's numbers were produced under.
std::string convention_for(Metric metric, const ScoringResources& resources);

/// Score of one candidate against a reference set, for the reference-driven
/// metrics (kBleu, kBleurt, kLabse). Pair metrics average over references.
/// Throws Error(kEmptyInput) without references, Error(kMissingPairScore) /
/// Error(kMissingEmbedding) for gaps in the external files and Error(kConfig)
/// when the needed resource is absent or the metric is not reference-driven.
double generation_score(std::string_view candidate, std::span<const std::string> references,
                        Metric metric, const ScoringResources& resources);

/// Where a generation comes from; needed by the MR- and run-aware metrics.
struct GenerationContext {
  const ReferenceGroup* group = nullptr;
  std::size_t output_index = 0;
  PromptMode representation = PromptMode::kBaseline;
  int epoch = 0;
};

/// Any metric. nullopt only for slot accuracy on an MR with no countable value.
std::optional<double> generation_score(std::string_view candidate,
                                       const GenerationContext& context, Metric metric,
                                       const ScoringResources& resources,
                                       std::optional<DaLabelMode> dac_mode = std::nullopt);

/// One (metric, representation, epoch) cell.
struct ScoreTable {
  Metric metric = Metric::kBleu;
  PromptMode representation = PromptMode::kBaseline;
  int epoch = 0;
  std::string convention;

  std::map<std::pair<std::string, std::size_t>, double> per_generation;
  std::map<std::string, double> per_mr;
  std::map<std::string, int> mr_fold;
  /// Pooled: unweighted mean over every scored MR of every fold.
  double average = 0.0;
  /// Unweighted mean over the MRs of each fold, and the mean of those.
  std::map<int, double> fold_averages;
  double fold_mean = 0.0;

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;
};

/// Mean of values summed in ascending order, so it does not depend on the
/// order the values arrive in. Throws Error(kEmptyInput) for no values.
double order_free_mean(std::vector<double> values);

/// Scores every record of one (representation, epoch) cell.
///
/// Throws Error(kUnknownSampleKey) for a key with no reference group,
/// Error(kIncompleteRecord) when a record does not hold exactly
/// resources.outputs_per_mr outputs, Error(kDuplicateRecord) for a repeated
/// key, Error(kConfig) when records span several cells and Error(kEmptyInput)
/// when no MR is left to average.
ScoreTable score_run(std::span<const ReferenceGroup> groups,
                     std::span<const GenerationRecord> records, Metric metric,
                     const ScoringResources& resources);

/// Partitions records by (representation, epoch) and scores each cell for
/// each metric. Tables come sorted by (metric, representation, epoch).
std::vector<ScoreTable> score_runs(std::span<const ReferenceGroup> groups,
                                   std::span<const GenerationRecord> records,
                                   std::span<const Metric> metrics,
                                   const ScoringResources& resources);

/// One JSON object per table per line.
void write_score_tables(std::span<const ScoreTable> tables, std::ostream& out);
std::vector<ScoreTable> parse_score_tables(std::string_view content);
std::vector<ScoreTable> load_score_tables(const std::filesystem::path& path);

/// Inputs for external scorers: every distinct sentence (outputs and
/// references) and every (output, reference) pair of the records. Both come
/// sorted by id without duplicates. Throws Error(kUnknownSampleKey).
struct SentenceRequest {
  std::string id;
  std::string text;
};
struct PairRequest {
  std::string id;
  std::string candidate;
  std::string reference;
};
std::vector<SentenceRequest> sentence_requests(std::span<const ReferenceGroup> groups,
                                               std::span<const GenerationRecord> records);
std::vector<PairRequest> pair_requests(std::span<const ReferenceGroup> groups,
                                       std::span<const GenerationRecord> records);
/// {id, text} and {id, candidate, reference} rows.
void write_sentence_requests(std::span<const SentenceRequest> rows, std::ostream& out);
void write_pair_requests(std::span<const PairRequest> rows, std::ostream& out);

/// metric,representation,epoch,average,fold_mean,mrs,generations,convention
void write_score_summary_csv(std::span<const ScoreTable> tables, std::ostream& out);

}  // namespace danlg

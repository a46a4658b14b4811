#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"

namespace danlg::cli {

namespace fs = std::filesystem;

/// Corpus statistics and histograms as one JSON document.
std::string stats_json(const Corpus& corpus, const BucketScheme& references,
                       const BucketScheme& attributes);
/// stats.json plus one CSV per histogram.
void write_stats(const Corpus& corpus, const BucketScheme& references,
                 const BucketScheme& attributes, const fs::path& out_dir);

/// Prompt rows to `out`; P-modes also get `<out>.assignment.json`.
/// Throws Error(kDegenerateMode) for P1 on a single-DA corpus.
void write_prompts(const Corpus& corpus, PromptMode mode, const SelectionPolicy& policy,
                   const fs::path& out);

struct ScoreInputs {
  std::vector<Metric> metrics;
  std::optional<fs::path> pair_scores;
  std::optional<fs::path> embeddings;
  std::optional<fs::path> predictions;
  std::optional<DaLabelMode> dac_mode;
  std::size_t outputs_per_mr = 5;
  SmoothingSpec smoothing;
  unsigned jobs = 0;
};

std::vector<ScoreTable> score_generations(const Corpus& corpus,
                                          std::span<const GenerationRecord> records,
                                          const ScoreInputs& inputs);
/// score_tables.jsonl and summary.csv.
void write_scores(std::span<const ScoreTable> tables, const fs::path& out_dir);
/// sentences.jsonl and pairs.jsonl for the external scorers.
void export_requests(const Corpus& corpus, std::span<const GenerationRecord> records,
                     const fs::path& out_dir);

struct DacTrainResult {
  BagOfTokensClassifier model;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  DacScore validation;
  TrainValSplit split;
};

DacTrainResult train_dac(const Corpus& corpus, std::optional<DaLabelMode> mode,
                         double train_fraction, std::uint64_t seed,
                         const ClassifierOptions& options);
/// train.jsonl, validation.jsonl and labels.json for external classifiers.
void write_dac_split(const DacTrainResult& result, const fs::path& out_dir);
/// Validation summary JSON.
std::string dac_summary_json(const DacTrainResult& result);
/// One prediction per generated output, tagged with representation and epoch.
std::vector<Prediction> predict_generations(const BagOfTokensClassifier& model,
                                            std::span<const GenerationRecord> records,
                                            unsigned jobs);

/// Curves, distributions and bucketed views for a set of score tables.
ReportInput analyze(const Corpus& corpus, std::span<const ScoreTable> tables, std::size_t bins,
                    const BucketScheme& references, const BucketScheme& attributes);

/// Writes the bundled synthetic fixtures and a run.yaml pointing at them.
void write_synthetic(const fs::path& out_dir, std::uint64_t seed);

/// stats -> prompts -> score -> dac -> analyze -> report under config.output.
void run_pipeline(const RunConfig& config, std::uint64_t seed, unsigned jobs);

Corpus load_config_corpus(const RunConfig& config);

}  // namespace danlg::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "danlg/analysis.hpp"
#include "danlg/corpus.hpp"
#include "danlg/dac.hpp"
#include "danlg/prompt.hpp"
#include "danlg/scoring.hpp"

namespace danlg::cli {

// Run configuration. Relative paths in the file resolve against the file's
// directory.
struct RunConfig {
  std::filesystem::path base_dir;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  std::filesystem::path output = "out";

  std::vector<std::filesystem::path> corpus_paths;
  CorpusFormat corpus_format = CorpusFormat::kAuto;

  std::vector<PromptMode> prompt_modes{PromptMode::kBaseline, PromptMode::kP1, PromptMode::kP2,
                                       PromptMode::kP3};
  SelectionPolicy::Order order = SelectionPolicy::Order::kLexicographic;
  SelectionPolicy::Self self = SelectionPolicy::Self::kAllowSelfFallback;

  std::optional<std::filesystem::path> generations;
  std::vector<Metric> metrics{Metric::kBleu, Metric::kSlotAccuracy};
  std::optional<std::filesystem::path> pair_scores;
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> predictions;
  std::size_t outputs_per_mr = 5;
  SmoothingSpec smoothing;

  std::optional<DaLabelMode> dac_mode;  // unset = detect
  double train_fraction = 0.95;
  ClassifierOptions classifier;
  std::optional<std::filesystem::path> dac_corpus;  // defaults to the main corpus

  std::size_t bins = 50;
  std::string reference_buckets = "1,2,3,4,5,6-10,11-20,21-50,51-100,101-1000,>1000";
  std::string attribute_buckets = "0,1,2,3,4,5,6,7,8+";
  std::vector<ReportFormat> formats{ReportFormat::kCsv, ReportFormat::kJsonl};
};

/// Parses the YAML file and checks that every referenced file exists.
/// Throws Error(kConfig) for schema problems and Error(kIo) for missing files.
RunConfig load_config(const std::filesystem::path& path);

/// --seed, then the config, then DA_NLG_KIT_SEED, then 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const RunConfig* config);

ReportFormat parse_report_format(const std::string& name);

}  // namespace danlg::cli

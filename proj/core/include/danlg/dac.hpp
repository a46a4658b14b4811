#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "danlg/corpus.hpp"

namespace danlg {

enum class DaLabelMode { kMulticlass, kMultilabel };

std::string_view to_string(DaLabelMode mode);
DaLabelMode parse_label_mode(std::string_view name);

/// Multilabel when any MR combines several DA groups, multiclass otherwise.
DaLabelMode detect_label_mode(const Corpus& corpus);

/// Gold labels of an MR: its full DA label (multiclass) or the sorted set of
/// its simple DA names (multilabel).
std::vector<std::string> gold_labels(const MeaningRepresentation& mr, DaLabelMode mode);

struct DaLabelSet {
  DaLabelMode mode = DaLabelMode::kMulticlass;
  std::vector<std::string> labels;  // sorted, unique

  static DaLabelSet from_samples(std::span<const CorpusSample> samples, DaLabelMode mode);
  bool contains(std::string_view label) const;
};

struct SplitSpec {
  double train_fraction = 0.95;
  std::uint64_t seed = 0;
};

struct TrainValSplit {
  std::vector<CorpusSample> train;
  std::vector<CorpusSample> validation;
};

/// Seeded Fisher-Yates shuffle, then split. The validation size is
/// floor(n * (1 - train_fraction)), so 101 samples give 96/5.
/// Throws Error(kTooSmall) below 20 samples.
TrainValSplit split_train_val(const Corpus& corpus, const SplitSpec& spec = {});

struct ClassifierOptions {
  double alpha = 1.0;
  double threshold = 0.5;  // multilabel decision threshold on P(label | x)
};

/// Additive-smoothed multinomial naive Bayes over unigram+bigram counts.
/// Multilabel mode keeps one present/absent scorer per simple DA.
class BagOfTokensClassifier {
 public:
  using Options = ClassifierOptions;

  /// Throws Error(kEmptyLabel) if a label of `label_set` has no training
  /// sample, Error(kEmptyInput) for an empty training set.
  static BagOfTokensClassifier train(std::span<const CorpusSample> samples,
                                     const DaLabelSet& label_set,
                                     const Options& options = {});
  static BagOfTokensClassifier train(std::span<const CorpusSample> samples,
                                     DaLabelMode mode, const Options& options = {});

  /// Multiclass: the single argmax label. Multilabel: every label whose
  /// posterior exceeds the threshold, or the argmax label when none does.
  /// Sentences with no known feature fall back to the priors.
  std::vector<std::string> predict(std::string_view sentence) const;

  /// Per label, in label order: the joint log-likelihood log P(label, x)
  /// (multiclass) or the posterior P(label present | x) (multilabel).
  std::vector<double> label_scores(std::string_view sentence) const;

  const DaLabelSet& label_set() const noexcept { return label_set_; }
  const Options& options() const noexcept { return options_; }
  std::size_t vocabulary_size() const noexcept { return vocabulary_.size(); }

  std::string to_json() const;
  static BagOfTokensClassifier from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static BagOfTokensClassifier load(const std::filesystem::path& path);

 private:
  struct LabelCounts {
    double docs = 0.0;   // training documents carrying the label
    double tokens = 0.0; // feature occurrences in those documents
    std::unordered_map<std::size_t, double> counts;
  };

  std::vector<std::size_t> feature_indices(std::string_view sentence) const;
  double log_present(std::size_t label, const std::vector<std::size_t>& features) const;
  double log_absent(std::size_t label, const std::vector<std::size_t>& features) const;

  DaLabelSet label_set_;
  Options options_;
  std::unordered_map<std::string, std::size_t> vocabulary_;
  std::vector<std::string> features_;  // index -> feature
  std::vector<double> all_counts_;     // per feature, over every document
  double all_tokens_ = 0.0;
  double num_docs_ = 0.0;
  std::vector<LabelCounts> labels_;
};

/// Unigram and bigram features of a sentence, in order, with repetitions.
std::vector<std::string> sentence_features(std::string_view sentence);

struct DacScore {
  double accuracy = 0.0;  // exact label (set) match
  double weighted = 0.0;  // gold-frequency-weighted per-label binary accuracy
  std::size_t count = 0;
};

/// Throws Error(kLengthMismatch) when sizes differ or are zero.
DacScore dac_score(std::span<const std::vector<std::string>> predictions,
                   std::span<const std::vector<std::string>> gold);

/// Exact-match outcome for one prediction (label order ignored).
bool dac_correct(std::vector<std::string> predicted, std::vector<std::string> gold);

}  // namespace danlg

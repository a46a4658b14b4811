#include "danlg/dac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "danlg/error.hpp"
#include "danlg/random.hpp"
#include "danlg/text.hpp"

namespace danlg {
namespace {

using nlohmann::json;

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

std::string_view to_string(DaLabelMode mode) {
  return mode == DaLabelMode::kMulticlass ? "multiclass" : "multilabel";
}

DaLabelMode parse_label_mode(std::string_view name) {
  if (name == "multiclass") return DaLabelMode::kMulticlass;
  if (name == "multilabel") return DaLabelMode::kMultilabel;
  throw Error(ErrorCode::kConfig, "unknown DAC mode '" + std::string(name) + "'");
}

DaLabelMode detect_label_mode(const Corpus& corpus) {
  for (const auto& sample : corpus.samples) {
    if (sample.mr.groups().size() > 1) return DaLabelMode::kMultilabel;
  }
  return DaLabelMode::kMulticlass;
}

std::vector<std::string> gold_labels(const MeaningRepresentation& mr, DaLabelMode mode) {
  if (mode == DaLabelMode::kMulticlass) return {mr.da_label()};
  return sorted_unique(mr.da_signature());
}

DaLabelSet DaLabelSet::from_samples(std::span<const CorpusSample> samples, DaLabelMode mode) {
  std::set<std::string> labels;
  for (const auto& sample : samples) {
    for (auto& l : gold_labels(sample.mr, mode)) labels.insert(std::move(l));
  }
  return DaLabelSet{mode, {labels.begin(), labels.end()}};
}

bool DaLabelSet::contains(std::string_view label) const {
  return std::binary_search(labels.begin(), labels.end(), label);
}

TrainValSplit split_train_val(const Corpus& corpus, const SplitSpec& spec) {
  const std::size_t n = corpus.samples.size();
  if (n < 20) {
    throw Error(ErrorCode::kTooSmall,
                "need at least 20 samples for a train/validation split, got " +
                    std::to_string(n));
  }
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorCode::kConfig, "train fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(spec.seed);
  shuffle(order, rng);
  // Round the validation share down; a tiny epsilon keeps 100 * 0.05 at 5.
  const auto val_size = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * (1.0 - spec.train_fraction) + 1e-9));
  TrainValSplit split;
  split.train.reserve(n - val_size);
  split.validation.reserve(val_size);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& sample = corpus.samples[order[i]];
    (i < n - val_size ? split.train : split.validation).push_back(sample);
  }
  return split;
}

std::vector<std::string> sentence_features(std::string_view sentence) {
  const auto tokens = word_tokenize(sentence);
  std::vector<std::string> features;
  features.reserve(tokens.size() * 2);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    features.push_back(tokens[i]);
    if (i + 1 < tokens.size()) features.push_back(tokens[i] + ' ' + tokens[i + 1]);
  }
  return features;
}

BagOfTokensClassifier BagOfTokensClassifier::train(std::span<const CorpusSample> samples,
                                                   DaLabelMode mode,
                                                   const Options& options) {
  return train(samples, DaLabelSet::from_samples(samples, mode), options);
}

BagOfTokensClassifier BagOfTokensClassifier::train(std::span<const CorpusSample> samples,
                                                   const DaLabelSet& label_set,
                                                   const Options& options) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "no training samples");
  if (label_set.labels.empty()) throw Error(ErrorCode::kEmptyLabel, "empty label set");
  if (!(options.alpha > 0.0)) throw Error(ErrorCode::kConfig, "alpha must be positive");

  BagOfTokensClassifier model;
  model.label_set_ = label_set;
  model.options_ = options;
  model.labels_.resize(label_set.labels.size());
  model.num_docs_ = static_cast<double>(samples.size());

  for (const auto& sample : samples) {
    std::vector<std::size_t> features;
    for (auto& f : sentence_features(sample.text)) {
      auto [it, inserted] = model.vocabulary_.try_emplace(f, model.features_.size());
      if (inserted) {
        model.features_.push_back(f);
        model.all_counts_.push_back(0.0);
      }
      features.push_back(it->second);
      model.all_counts_[it->second] += 1.0;
    }
    model.all_tokens_ += static_cast<double>(features.size());
    for (const auto& l : gold_labels(sample.mr, label_set.mode)) {
      auto pos = std::lower_bound(label_set.labels.begin(), label_set.labels.end(), l);
      if (pos == label_set.labels.end() || *pos != l) {
        throw Error(ErrorCode::kEmptyLabel, "training label '" + l + "' is not in the label set");
      }
      auto& counts = model.labels_[static_cast<std::size_t>(pos - label_set.labels.begin())];
      counts.docs += 1.0;
      counts.tokens += static_cast<double>(features.size());
      for (auto f : features) counts.counts[f] += 1.0;
    }
  }
  for (std::size_t l = 0; l < model.labels_.size(); ++l) {
    if (model.labels_[l].docs == 0.0) {
      throw Error(ErrorCode::kEmptyLabel,
                  "label '" + label_set.labels[l] + "' has no training sample");
    }
  }
  return model;
}

std::vector<std::size_t> BagOfTokensClassifier::feature_indices(std::string_view sentence) const {
  std::vector<std::size_t> idx;
  for (const auto& f : sentence_features(sentence)) {
    if (auto it = vocabulary_.find(f); it != vocabulary_.end()) idx.push_back(it->second);
  }
  return idx;
}

double BagOfTokensClassifier::log_present(std::size_t label,
                                          const std::vector<std::size_t>& features) const {
  const auto& c = labels_[label];
  const double alpha = options_.alpha;
  const double prior = label_set_.mode == DaLabelMode::kMulticlass
                           ? c.docs / num_docs_
                           : (c.docs + alpha) / (num_docs_ + 2 * alpha);
  double s = std::log(prior);
  const double denom = std::log(c.tokens + alpha * static_cast<double>(features_.size()));
  for (auto f : features) {
    auto it = c.counts.find(f);
    s += std::log((it == c.counts.end() ? 0.0 : it->second) + alpha) - denom;
  }
  return s;
}

double BagOfTokensClassifier::log_absent(std::size_t label,
                                         const std::vector<std::size_t>& features) const {
  const auto& c = labels_[label];
  const double alpha = options_.alpha;
  double s = std::log(1.0 - (c.docs + alpha) / (num_docs_ + 2 * alpha));
  const double denom =
      std::log(all_tokens_ - c.tokens + alpha * static_cast<double>(features_.size()));
  for (auto f : features) {
    auto it = c.counts.find(f);
    const double with = it == c.counts.end() ? 0.0 : it->second;
    s += std::log(all_counts_[f] - with + alpha) - denom;
  }
  return s;
}

std::vector<double> BagOfTokensClassifier::label_scores(std::string_view sentence) const {
  const auto features = feature_indices(sentence);
  std::vector<double> scores;
  scores.reserve(labels_.size());
  for (std::size_t l = 0; l < labels_.size(); ++l) {
    const double yes = log_present(l, features);
    if (label_set_.mode == DaLabelMode::kMulticlass) {
      scores.push_back(yes);
    } else {
      const double no = log_absent(l, features);
      scores.push_back(std::exp(yes - log_sum_exp(yes, no)));
    }
  }
  return scores;
}

std::vector<std::string> BagOfTokensClassifier::predict(std::string_view sentence) const {
  const auto scores = label_scores(sentence);
  const auto& labels = label_set_.labels;
  // max_element keeps the first of equal scores, so ties go to the smaller label.
  const auto best = static_cast<std::size_t>(
      std::max_element(scores.begin(), scores.end()) - scores.begin());
  if (label_set_.mode == DaLabelMode::kMulticlass) return {labels[best]};
  std::vector<std::string> out;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    if (scores[l] > options_.threshold) out.push_back(labels[l]);
  }
  if (out.empty()) out.push_back(labels[best]);
  return out;
}

std::string BagOfTokensClassifier::to_json() const {
  json per_label = json::array();
  for (const auto& c : labels_) {
    std::vector<std::pair<std::size_t, double>> sparse(c.counts.begin(), c.counts.end());
    std::sort(sparse.begin(), sparse.end());
    per_label.push_back({{"docs", c.docs}, {"tokens", c.tokens}, {"counts", sparse}});
  }
  json j = {
      {"format", "danlg-bag-of-tokens-nb"},
      {"version", 1},
      {"mode", std::string(to_string(label_set_.mode))},
      {"labels", label_set_.labels},
      {"alpha", options_.alpha},
      {"threshold", options_.threshold},
      {"num_docs", num_docs_},
      {"all_tokens", all_tokens_},
      {"features", features_},
      {"all_counts", all_counts_},
      {"label_counts", per_label},
  };
  return j.dump();
}

BagOfTokensClassifier BagOfTokensClassifier::from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "danlg-bag-of-tokens-nb") {
      throw Error(ErrorCode::kFormat, "not a classifier model file");
    }
    BagOfTokensClassifier model;
    model.label_set_.mode = parse_label_mode(j.at("mode").get<std::string>());
    model.label_set_.labels = j.at("labels").get<std::vector<std::string>>();
    model.options_.alpha = j.at("alpha").get<double>();
    model.options_.threshold = j.at("threshold").get<double>();
    model.num_docs_ = j.at("num_docs").get<double>();
    model.all_tokens_ = j.at("all_tokens").get<double>();
    model.features_ = j.at("features").get<std::vector<std::string>>();
    model.all_counts_ = j.at("all_counts").get<std::vector<double>>();
    if (model.all_counts_.size() != model.features_.size()) {
      throw Error(ErrorCode::kFormat, "feature counts do not match the vocabulary");
    }
    for (std::size_t i = 0; i < model.features_.size(); ++i) {
      model.vocabulary_.emplace(model.features_[i], i);
    }
    for (const auto& entry : j.at("label_counts")) {
      LabelCounts c;
      c.docs = entry.at("docs").get<double>();
      c.tokens = entry.at("tokens").get<double>();
      for (const auto& [f, count] :
           entry.at("counts").get<std::vector<std::pair<std::size_t, double>>>()) {
        if (f >= model.features_.size()) throw Error(ErrorCode::kFormat, "feature index out of range");
        c.counts.emplace(f, count);
      }
      model.labels_.push_back(std::move(c));
    }
    if (model.labels_.size() != model.label_set_.labels.size()) {
      throw Error(ErrorCode::kFormat, "label counts do not match the labels");
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad classifier model: ") + e.what());
  }
}

void BagOfTokensClassifier::save(const std::filesystem::path& path) const {
  write_file(path, to_json());
}

BagOfTokensClassifier BagOfTokensClassifier::load(const std::filesystem::path& path) {
  return from_json(read_file(path));
}

bool dac_correct(std::vector<std::string> predicted, std::vector<std::string> gold) {
  return sorted_unique(std::move(predicted)) == sorted_unique(std::move(gold));
}

DacScore dac_score(std::span<const std::vector<std::string>> predictions,
                   std::span<const std::vector<std::string>> gold) {
  if (predictions.size() != gold.size() || gold.empty()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(gold.size()) + " gold items");
  }
  std::size_t exact = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_label;  // weight, correct
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto p = sorted_unique(predictions[i]);
    const auto g = sorted_unique(gold[i]);
    if (p == g) ++exact;
    for (const auto& l : g) per_label[l].first += 1;
  }
  for (auto& [label, stats] : per_label) {
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool in_pred =
          std::find(predictions[i].begin(), predictions[i].end(), label) != predictions[i].end();
      const bool in_gold = std::find(gold[i].begin(), gold[i].end(), label) != gold[i].end();
      if (in_pred == in_gold) ++stats.second;
    }
  }
  double weighted_sum = 0.0;
  double weight_total = 0.0;
  for (const auto& [label, stats] : per_label) {
    const double acc = static_cast<double>(stats.second) / static_cast<double>(gold.size());
    weighted_sum += static_cast<double>(stats.first) * acc;
    weight_total += static_cast<double>(stats.first);
  }
  DacScore out;
  out.count = gold.size();
  out.accuracy = static_cast<double>(exact) / static_cast<double>(gold.size());
  out.weighted = weight_total > 0.0 ? weighted_sum / weight_total : 0.0;
  return out;
}

}  // namespace danlg

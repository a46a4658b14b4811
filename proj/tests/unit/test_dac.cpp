#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "danlg/dac.hpp"
#include "danlg/error.hpp"
#include "danlg/scoring.hpp"
#include "danlg/synthetic.hpp"
#include "support.hpp"

namespace danlg {
namespace {

using Labels = std::vector<std::string>;

Corpus make_corpus(const std::vector<std::pair<std::string, std::string>>& rows) {
  Corpus c;
  c.name = "hand";
  for (const auto& [mr, text] : rows) {
    c.samples.push_back({parse_mr(mr), text, c.samples.size()});
  }
  return c;
}

Corpus multiclass_training() {
  return make_corpus({{"inform ( name = x )", "x is a good game"},
                      {"inform ( name = y )", "y is a great game"},
                      {"request ( genres = ? )", "what games do you like"},
                      {"request ( genres = ? )", "do you like puzzle games"},
                      {"confirm ( name = x )", "you mean x right"}});
}

Corpus multilabel_training() {
  return make_corpus({{"inform ( name = x ) & request ( genres = ? )", "x is fun what genres do you like"},
                      {"inform ( name = y )", "y is fun"},
                      {"request ( genres = ? )", "what genres do you like"},
                      {"greet (  ) & inform ( name = z )", "hello z is fun"},
                      {"greet (  )", "hello there"}});
}

void expect_scores(const std::vector<double>& got, const std::vector<double>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9) << i;
}

// Reference values: sklearn MultinomialNB(alpha=1) over the same uni+bigram
// features (tests/oracles/oracles.py).
TEST(BagOfTokens, MulticlassMatchesSklearn) {
  const auto corpus = multiclass_training();
  const auto model = BagOfTokensClassifier::train(corpus.samples, DaLabelMode::kMulticlass);
  EXPECT_EQ(model.label_set().labels, (Labels{"confirm", "inform", "request"}));
  expect_scores(model.label_scores("is x a game you like"),
                {-25.686246669398912, -24.170048772084268, -24.86319595264421});
  expect_scores(model.label_scores("you like puzzle right"),
                {-22.048660509672523, -24.267212520537914, -19.585081293413694});
  expect_scores(model.label_scores("unknown words only"),
                {-1.6094379124341003, -0.916290731874155, -0.916290731874155});
  EXPECT_EQ(model.predict("is x a game you like"), Labels{"inform"});
  EXPECT_EQ(model.predict("you like puzzle right"), Labels{"request"});
  // Prior tie between inform and request goes to the first label.
  EXPECT_EQ(model.predict("unknown words only"), Labels{"inform"});
}

TEST(BagOfTokens, MultilabelMatchesManualOracle) {
  const auto corpus = multilabel_training();
  const auto model = BagOfTokensClassifier::train(corpus.samples, DaLabelMode::kMultilabel);
  EXPECT_EQ(model.label_set().labels, (Labels{"greet", "inform", "request"}));
  expect_scores(model.label_scores("hello what genres"),
                {0.3394016005816924, 0.24250075749924288, 0.7425561278838962});
  expect_scores(model.label_scores("y is fun"),
                {0.35053441170244576, 0.9828672932516322, 0.018832132675139703});
  expect_scores(model.label_scores("zzz"),
                {0.4285714285714286, 0.5714285714285714, 0.4285714285714286});
  EXPECT_EQ(model.predict("hello what genres"), Labels{"request"});
  EXPECT_EQ(model.predict("y is fun"), Labels{"inform"});
  EXPECT_EQ(model.predict("zzz"), Labels{"inform"});
}

TEST(BagOfTokens, SaveLoadKeepsPredictions) {
  testing::ScratchDir dir("dac");
  const auto corpus = synthetic_dac_corpus(200, 4);
  const auto model = BagOfTokensClassifier::train(corpus.samples, DaLabelMode::kMulticlass);
  model.save(dir / "model.json");
  const auto back = BagOfTokensClassifier::load(dir / "model.json");
  EXPECT_EQ(back.to_json(), model.to_json());
  EXPECT_EQ(back.vocabulary_size(), model.vocabulary_size());
  for (const auto& s : corpus.samples) {
    EXPECT_EQ(back.predict(s.text), model.predict(s.text));
    EXPECT_EQ(back.label_scores(s.text), model.label_scores(s.text));
  }
  EXPECT_THROW(BagOfTokensClassifier::from_json("{\"format\": \"other\"}"), Error);
}

TEST(BagOfTokens, LabelClosure) {
  const auto corpus = synthetic_corpus();
  for (const auto mode : {DaLabelMode::kMulticlass, DaLabelMode::kMultilabel}) {
    const auto model = BagOfTokensClassifier::train(corpus.samples, mode);
    SplitMix64 rng(1);
    const std::vector<std::string> words{"is", "the", "game", "what", "do", "you", "like", "zzz"};
    for (int i = 0; i < 200; ++i) {
      const auto labels = model.predict(testing::random_words(rng, words, 1, 8));
      ASSERT_FALSE(labels.empty());
      if (mode == DaLabelMode::kMulticlass) ASSERT_EQ(labels.size(), 1u);
      for (const auto& l : labels) EXPECT_TRUE(model.label_set().contains(l)) << l;
    }
  }
}

TEST(BagOfTokens, TrainingErrors) {
  const auto corpus = multiclass_training();
  DaLabelSet extra{DaLabelMode::kMulticlass, {"confirm", "greet", "inform", "request"}};
  try {
    BagOfTokensClassifier::train(corpus.samples, extra);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyLabel);
  }
  EXPECT_THROW(BagOfTokensClassifier::train(std::span<const CorpusSample>{}, DaLabelMode::kMulticlass),
               Error);
}

TEST(Labels, GoldAndDetection) {
  const auto mr = parse_mr("request ( a = ? ) & inform ( b = c ) & inform ( d = e )");
  EXPECT_EQ(gold_labels(mr, DaLabelMode::kMulticlass), (Labels{"request & inform & inform"}));
  EXPECT_EQ(gold_labels(mr, DaLabelMode::kMultilabel), (Labels{"inform", "request"}));
  EXPECT_EQ(detect_label_mode(multiclass_training()), DaLabelMode::kMulticlass);
  EXPECT_EQ(detect_label_mode(multilabel_training()), DaLabelMode::kMultilabel);
  EXPECT_EQ(parse_label_mode(to_string(DaLabelMode::kMultilabel)), DaLabelMode::kMultilabel);
}

TEST(Split, SizesAndDisjointness) {
  const auto corpus = synthetic_dac_corpus(101, 2);
  const auto split = split_train_val(corpus, {.train_fraction = 0.95, .seed = 9});
  EXPECT_EQ(split.train.size(), 96u);
  EXPECT_EQ(split.validation.size(), 5u);
  std::set<std::size_t> ids;
  for (const auto& s : split.train) ids.insert(s.sample_id);
  for (const auto& s : split.validation) EXPECT_TRUE(ids.insert(s.sample_id).second);
  EXPECT_EQ(ids.size(), 101u);

  const auto again = split_train_val(corpus, {.train_fraction = 0.95, .seed = 9});
  for (std::size_t i = 0; i < again.validation.size(); ++i) {
    EXPECT_EQ(again.validation[i].sample_id, split.validation[i].sample_id);
  }
  for (std::size_t n : {20u, 37u, 100u, 999u}) {
    const auto s = split_train_val(synthetic_dac_corpus(n, 1), {});
    EXPECT_NEAR(static_cast<double>(s.validation.size()), n * 0.05, 1.0);
    EXPECT_EQ(s.train.size() + s.validation.size(), n);
  }
  try {
    split_train_val(synthetic_dac_corpus(19, 1), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooSmall);
  }
}

TEST(DacScore, FlatRecount) {
  SplitMix64 rng(21);
  const Labels pool{"inform", "request", "confirm", "greet"};
  for (int round = 0; round < 300; ++round) {
    const auto n = 1 + rng.below(40);
    std::vector<Labels> pred(n), gold(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& l : pool) {
        if (rng.below(3) == 0) gold[i].push_back(l);
        if (rng.below(3) == 0) pred[i].push_back(l);
      }
      if (gold[i].empty()) gold[i].push_back(testing::pick(rng, pool));
    }
    std::size_t exact = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::set(pred[i].begin(), pred[i].end()) == std::set(gold[i].begin(), gold[i].end())) {
        ++exact;
      }
    }
    // Weighted: every (item, gold label) occurrence votes for that label's
    // binary accuracy.
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& label : gold[i]) {
        std::size_t agree = 0;
        for (std::size_t j = 0; j < n; ++j) {
          const bool p = std::count(pred[j].begin(), pred[j].end(), label) > 0;
          const bool g = std::count(gold[j].begin(), gold[j].end(), label) > 0;
          agree += p == g;
        }
        num += static_cast<double>(agree) / static_cast<double>(n);
        den += 1.0;
      }
    }
    const auto score = dac_score(pred, gold);
    EXPECT_EQ(score.count, n);
    EXPECT_DOUBLE_EQ(score.accuracy, static_cast<double>(exact) / static_cast<double>(n));
    EXPECT_NEAR(score.weighted, num / den, 1e-12);
  }
  std::vector<Labels> one{{"a"}};
  EXPECT_THROW(dac_score(one, std::vector<Labels>{}), Error);
  EXPECT_TRUE(dac_correct({"b", "a", "a"}, {"a", "b"}));
  EXPECT_FALSE(dac_correct({"a"}, {"a", "b"}));
}

TEST(DacScore, RunAverageEqualsFlatCount) {
  // Equal K per MR, so the mean of per-MR means is the flat mean.
  SplitMix64 rng(8);
  const auto corpus = synthetic_corpus({.num_mrs = 40});
  const auto groups = group_references(corpus);
  const std::vector<PromptMode> modes{PromptMode::kP2};
  const auto records = synthetic_generations(corpus, modes, {.num_mrs = 40, .epochs = 0});
  const auto labels = DaLabelSet::from_samples(corpus.samples, DaLabelMode::kMulticlass).labels;
  PredictionTable predictions;
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& rec : records) {
    const auto gold = gold_labels(parse_mr(rec.sample_key), DaLabelMode::kMulticlass);
    for (std::size_t k = 0; k < rec.outputs.size(); ++k) {
      const auto guess = rng.below(2) ? gold : Labels{testing::pick(rng, labels)};
      correct += guess == gold;
      ++total;
      predictions.insert({rec.sample_key, k, guess, {}, {}});
    }
  }
  ScoringResources res;
  res.predictions = &predictions;
  res.dac_mode = DaLabelMode::kMulticlass;
  const auto table = score_run(groups, records, Metric::kDac, res);
  EXPECT_NEAR(table.average, static_cast<double>(correct) / static_cast<double>(total), 1e-12);
}

TEST(Features, UnigramsAndBigrams) {
  EXPECT_EQ(sentence_features("Is it fun?"),
            (std::vector<std::string>{"is", "is it", "it", "it fun", "fun"}));
}

}  // namespace
}  // namespace danlg

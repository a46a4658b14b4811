#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "danlg/error.hpp"
#include "danlg/scoring.hpp"
#include "danlg/synthetic.hpp"
#include "oracle.hpp"
#include "support.hpp"

namespace danlg {
namespace {

constexpr PromptMode kModes[] = {PromptMode::kBaseline, PromptMode::kP3};

struct Fixture {
  Corpus corpus;
  std::vector<ReferenceGroup> groups;
  std::vector<GenerationRecord> records;
  testing::SyntheticResources external;
  ScoringResources resources;

  explicit Fixture(std::uint64_t seed, std::size_t mrs = 30) {
    const SyntheticSpec spec{.seed = seed, .num_mrs = mrs, .epochs = 2};
    corpus = synthetic_corpus(spec);
    groups = group_references(corpus);
    records = synthetic_generations(corpus, kModes, spec);
    external = testing::synthetic_resources(groups, records);
    resources.pair_scores = &external.pairs;
    resources.embeddings = &external.embeddings;
  }
};

TEST(ScoreRun, MatchesNestedMeanOracle) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    Fixture f(seed);
    for (Metric metric : {Metric::kBleu, Metric::kSlotAccuracy, Metric::kBleurt, Metric::kLabse}) {
      const auto run = testing::cell(f.records, PromptMode::kP3, static_cast<int>(seed % 3));
      const auto table = score_run(f.groups, run, metric, f.resources);
      const auto oracle = testing::nested_mean_oracle(f.groups, run, metric, f.resources);
      ASSERT_EQ(table.per_mr.size(), oracle.per_mr.size()) << to_string(metric);
      for (const auto& [key, value] : oracle.per_mr) {
        EXPECT_NEAR(table.per_mr.at(key), value, 1e-12) << key;
      }
      EXPECT_NEAR(table.average, oracle.average, 1e-12);
    }
  }
}

TEST(ScoreRun, SlotAccuracyDropsUncountableMrs) {
  Fixture f(2);
  const auto run = testing::cell(f.records, PromptMode::kBaseline, 1);
  const auto sa = score_run(f.groups, run, Metric::kSlotAccuracy, f.resources);
  const auto bleu = score_run(f.groups, run, Metric::kBleu, f.resources);
  EXPECT_LT(sa.per_mr.size(), bleu.per_mr.size());
  EXPECT_FALSE(sa.per_mr.count("greet (  )"));
  EXPECT_TRUE(bleu.per_mr.count("greet (  )"));
}

TEST(ScoreRun, FoldAverages) {
  Fixture f(3);
  const auto table =
      score_run(f.groups, testing::cell(f.records, PromptMode::kP3, 2), Metric::kBleu, f.resources);
  std::map<int, std::vector<double>> by_fold;
  for (const auto& [key, v] : table.per_mr) by_fold[table.mr_fold.at(key)].push_back(v);
  ASSERT_EQ(table.fold_averages.size(), by_fold.size());
  std::vector<double> means;
  for (const auto& [fold, values] : by_fold) {
    EXPECT_NEAR(table.fold_averages.at(fold), testing::naive_mean(values), 1e-12);
    means.push_back(testing::naive_mean(values));
  }
  EXPECT_NEAR(table.fold_mean, testing::naive_mean(means), 1e-12);
}

TEST(ScoreRunProperty, PermutationInvariant) {
  SplitMix64 rng(55);
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Fixture f(seed, 20);
    auto run = testing::cell(f.records, PromptMode::kBaseline, 2);
    for (Metric metric : {Metric::kBleu, Metric::kLabse}) {
      const auto base = score_run(f.groups, run, metric, f.resources);
      auto shuffled = run;
      shuffle(shuffled, rng);
      for (auto& rec : shuffled) shuffle(rec.outputs, rng);
      const auto again = score_run(f.groups, shuffled, metric, f.resources);
      EXPECT_EQ(again.per_mr, base.per_mr);
      EXPECT_EQ(again.average, base.average);
      EXPECT_EQ(again.fold_mean, base.fold_mean);
    }
  }
}

TEST(ScoreRunProperty, JobCountDoesNotChangeResults) {
  Fixture f(4);
  const auto run = testing::cell(f.records, PromptMode::kP3, 1);
  auto one = f.resources;
  one.jobs = 1;
  auto four = f.resources;
  four.jobs = 4;
  EXPECT_EQ(score_run(f.groups, run, Metric::kBleu, one),
            score_run(f.groups, run, Metric::kBleu, four));
}

TEST(ScoreRun, Errors) {
  Fixture f(5, 10);
  auto run = testing::cell(f.records, PromptMode::kBaseline, 0);
  auto expect_code = [&](std::vector<GenerationRecord> recs, ErrorCode code) {
    try {
      score_run(f.groups, recs, Metric::kBleu, f.resources);
      ADD_FAILURE() << "no error for " << to_string(code);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code);
    }
  };
  auto unknown = run;
  unknown[0].sample_key = "inform ( name = Nowhere )";
  expect_code(unknown, ErrorCode::kUnknownSampleKey);
  auto short_record = run;
  short_record[0].outputs.pop_back();
  expect_code(short_record, ErrorCode::kIncompleteRecord);
  auto dup = run;
  dup.push_back(run[0]);
  expect_code(dup, ErrorCode::kDuplicateRecord);
  auto mixed = run;
  mixed[1].epoch = 1;
  expect_code(mixed, ErrorCode::kConfig);
  expect_code({}, ErrorCode::kEmptyInput);

  ScoringResources bare;
  try {
    score_run(f.groups, run, Metric::kBleurt, bare);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  PairScoreTable empty_pairs;
  bare.pair_scores = &empty_pairs;
  try {
    score_run(f.groups, run, Metric::kBleurt, bare);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingPairScore);
  }
}

TEST(GenerationScore, MeanOverReferencesNeverExceedsMax) {
  SplitMix64 rng(12);
  for (int i = 0; i < 500; ++i) {
    PairScoreTable pairs;
    std::vector<std::string> refs;
    std::vector<double> values;
    const auto n = 1 + rng.below(6);
    const bool all_equal = rng.below(4) == 0;
    const double shared = rng.uniform();
    for (std::size_t r = 0; r < n; ++r) {
      refs.push_back("reference " + std::to_string(r));
      values.push_back(all_equal ? shared : rng.uniform());
      pairs.insert(pair_id("candidate", refs.back()), values.back());
    }
    ScoringResources res;
    res.pair_scores = &pairs;
    const double score = generation_score("candidate", refs, Metric::kBleurt, res);
    const double max = *std::max_element(values.begin(), values.end());
    const double min = *std::min_element(values.begin(), values.end());
    EXPECT_LE(score, max);
    if (min == max) EXPECT_EQ(score, max);
    else EXPECT_LT(score, max);
  }
}

TEST(GenerationScore, ContextOverloadNeedsAGroup) {
  ScoringResources res;
  EXPECT_THROW(generation_score("x", GenerationContext{}, Metric::kSlotAccuracy, res), Error);
  const std::vector<std::string> refs{"a"};
  EXPECT_THROW(generation_score("x", refs, Metric::kSlotAccuracy, res), Error);
}

TEST(GenerationScore, Dac) {
  const auto corpus = parse_corpus(
      "{\"mr\": \"inform ( name = A ) & request ( genres = ? )\", \"text\": \"A. Genres?\"}\n",
      CorpusFormat::kJsonl, "x");
  const auto groups = group_references(corpus);
  PredictionTable predictions;
  predictions.insert({groups[0].mr_key, 0, {"request", "inform"}, {}, {}});
  predictions.insert({groups[0].mr_key, 1, {"inform"}, {}, {}});
  ScoringResources res;
  res.predictions = &predictions;
  GenerationContext ctx{&groups[0], 0, PromptMode::kBaseline, 0};
  EXPECT_EQ(*generation_score("x", ctx, Metric::kDac, res, DaLabelMode::kMultilabel), 1.0);
  EXPECT_EQ(*generation_score("x", ctx, Metric::kDac, res, DaLabelMode::kMulticlass), 0.0);
  ctx.output_index = 1;
  EXPECT_EQ(*generation_score("x", ctx, Metric::kDac, res, DaLabelMode::kMultilabel), 0.0);
  ctx.output_index = 2;
  try {
    generation_score("x", ctx, Metric::kDac, res);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingPrediction);
  }
}

TEST(OrderFreeMean, IndependentOfOrder) {
  SplitMix64 rng(3);
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(rng.uniform() * std::pow(10.0, rng.below(12)));
  const double m = order_free_mean(v);
  for (int i = 0; i < 20; ++i) {
    shuffle(v, rng);
    EXPECT_EQ(order_free_mean(v), m);
  }
  EXPECT_THROW(order_free_mean({}), Error);
}

TEST(ScoreRuns, SortedCellsAndSerializationRoundTrip) {
  Fixture f(6, 15);
  const std::vector<Metric> metrics{Metric::kSlotAccuracy, Metric::kBleu};
  const auto tables = score_runs(f.groups, f.records, metrics, f.resources);
  ASSERT_EQ(tables.size(), 2u * 2u * 3u);
  for (std::size_t i = 1; i < tables.size(); ++i) {
    EXPECT_LT(std::tuple(tables[i - 1].metric, tables[i - 1].representation, tables[i - 1].epoch),
              std::tuple(tables[i].metric, tables[i].representation, tables[i].epoch));
  }
  std::ostringstream out;
  write_score_tables(tables, out);
  EXPECT_EQ(parse_score_tables(out.str()), tables);

  std::ostringstream again;
  write_score_tables(parse_score_tables(out.str()), again);
  EXPECT_EQ(again.str(), out.str());

  std::ostringstream csv;
  write_score_summary_csv(tables, csv);
  const auto rows = parse_csv(csv.str());
  ASSERT_EQ(rows.size(), tables.size() + 1);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"metric", "representation", "epoch", "average",
                                               "fold_mean", "mrs", "generations", "convention"}));
  EXPECT_EQ(rows[1][0], "bleu");
  EXPECT_THROW(parse_score_tables("{\"metric\": \"bleu\"}\n"), FormatError);
}

TEST(Requests, SortedAndUnique) {
  Fixture f(7, 10);
  const auto sentences = sentence_requests(f.groups, f.records);
  const auto pairs = pair_requests(f.groups, f.records);
  for (std::size_t i = 1; i < sentences.size(); ++i) EXPECT_LT(sentences[i - 1].id, sentences[i].id);
  for (std::size_t i = 1; i < pairs.size(); ++i) EXPECT_LT(pairs[i - 1].id, pairs[i].id);
  for (const auto& s : sentences) EXPECT_EQ(s.id, sentence_id(s.text));
  for (const auto& p : pairs) EXPECT_EQ(p.id, pair_id(p.candidate, p.reference));
}

TEST(MetricNames, Parse) {
  for (Metric m : all_metrics()) EXPECT_EQ(parse_metric(to_string(m)), m);
  EXPECT_EQ(parse_metric("sa"), Metric::kSlotAccuracy);
  EXPECT_EQ(parse_metric("slot_accuracy"), Metric::kSlotAccuracy);
  EXPECT_THROW(parse_metric("rouge"), Error);
}

}  // namespace
}  // namespace danlg

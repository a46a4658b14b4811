#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "danlg/corpus_stats.hpp"
#include "danlg/dac.hpp"
#include "danlg/metrics.hpp"
#include "danlg/mr.hpp"
#include "danlg/scoring.hpp"
#include "danlg/synthetic.hpp"

namespace {

using namespace danlg;

void BM_ParseMr(benchmark::State& state) {
  const std::string text =
      "SYSTEM_Booking_Book ( bookday = Wednesday ; bookpeople = five ; booktime = 11 am ; "
      "name = this restaurant ; ref = DU8IWQZ2 ) & SYSTEM_Restaurant_Inform ( address = 2 Rose "
      "Crescent City Centre ; name = The Gardenia )";
  for (auto _ : state) benchmark::DoNotOptimize(parse_mr(text));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParseMr);

void BM_Bleu(benchmark::State& state) {
  std::vector<std::string> refs;
  for (int i = 0; i < state.range(0); ++i) {
    refs.push_back("Crysis is a 2007 action-adventure shooter with good reviews number " +
                   std::to_string(i));
  }
  const std::string cand = "Crysis is an action-adventure shooter released in 2007 to good reviews.";
  for (auto _ : state) benchmark::DoNotOptimize(bleu4(cand, refs));
}
BENCHMARK(BM_Bleu)->Arg(1)->Arg(3)->Arg(12)->Arg(46);

void BM_ScoreRun(benchmark::State& state) {
  const SyntheticSpec spec{.num_mrs = static_cast<std::size_t>(state.range(0)), .epochs = 0};
  const auto corpus = synthetic_corpus(spec);
  const auto groups = group_references(corpus);
  const std::vector<PromptMode> modes{PromptMode::kP3};
  const auto records = synthetic_generations(corpus, modes, spec);
  ScoringResources res;
  res.jobs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(score_run(groups, records, Metric::kBleu, res));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(records.size() * 5));
}
BENCHMARK(BM_ScoreRun)->Arg(60)->Arg(240)->Unit(benchmark::kMillisecond);

void BM_DacPredict(benchmark::State& state) {
  const auto corpus = synthetic_dac_corpus(1000);
  const auto model = BagOfTokensClassifier::train(corpus.samples, DaLabelMode::kMulticlass);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict(corpus.samples[i++ % corpus.size()].text));
  }
}
BENCHMARK(BM_DacPredict);

void BM_DacTrain(benchmark::State& state) {
  const auto corpus = synthetic_dac_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        BagOfTokensClassifier::train(corpus.samples, DaLabelMode::kMulticlass));
  }
}
BENCHMARK(BM_DacTrain)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

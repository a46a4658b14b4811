#include "commands.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "danlg/error.hpp"
#include "danlg/parallel.hpp"
#include "danlg/synthetic.hpp"
#include "danlg/text.hpp"

namespace danlg::cli {
namespace {

using ojson = nlohmann::ordered_json;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "cannot create directory '" + dir.string() + "'");
  }
}

ojson histogram_json(const Histogram& h) {
  ojson rows = ojson::array();
  const auto pct = h.percentages();
  for (std::size_t i = 0; i < h.buckets.size(); ++i) {
    rows.push_back({{"bucket", h.buckets[i].label}, {"count", h.counts[i]}, {"percent", pct[i]}});
  }
  return rows;
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << "bucket,count,percent\n";
  const auto pct = h.percentages();
  for (std::size_t i = 0; i < h.buckets.size(); ++i) {
    out << csv_escape(h.buckets[i].label) << ',' << h.counts[i] << ',' << format_number(pct[i])
        << '\n';
  }
  return out.str();
}

ojson sample_id_json(const std::optional<Demonstrator>& d) {
  if (!d) return nullptr;
  return d->sample.sample_id;
}

}  // namespace

Corpus load_config_corpus(const RunConfig& config) {
  if (config.corpus_paths.size() == 1) return load_corpus(config.corpus_paths.front(), config.corpus_format);
  return load_corpus_files(config.corpus_paths, config.corpus_format);
}

std::string stats_json(const Corpus& corpus, const BucketScheme& references,
                       const BucketScheme& attributes) {
  const auto stats = compute_stats(corpus);
  const auto groups = group_references(corpus);
  ojson doc = {
      {"corpus", corpus.name},
      {"num_das", stats.num_das},
      {"num_simple_das", stats.num_simple_das},
      {"num_attributes", stats.num_attributes},
      {"num_mrs", stats.num_mrs},
      {"corpus_size", stats.corpus_size},
      {"running_words", stats.running_words},
      {"vocabulary", stats.vocabulary},
      {"reference_histogram", histogram_json(reference_histogram(groups, references))},
      {"attribute_histogram", histogram_json(attribute_histogram(corpus, attributes))},
  };
  return doc.dump(2) + "\n";
}

void write_stats(const Corpus& corpus, const BucketScheme& references,
                 const BucketScheme& attributes, const fs::path& out_dir) {
  ensure_dir(out_dir);
  write_file(out_dir / "stats.json", stats_json(corpus, references, attributes));
  const auto groups = group_references(corpus);
  write_file(out_dir / "reference_histogram.csv",
             histogram_csv(reference_histogram(groups, references)));
  write_file(out_dir / "attribute_histogram.csv",
             histogram_csv(attribute_histogram(corpus, attributes)));
}

void write_prompts(const Corpus& corpus, PromptMode mode, const SelectionPolicy& policy,
                   const fs::path& out) {
  std::optional<DemonstratorAssignment> assignment;
  if (mode != PromptMode::kBaseline) assignment = assign_demonstrators(corpus, mode, policy);
  const DemonstratorAssignment* a = assignment ? &*assignment : nullptr;

  std::ostringstream rows;
  for (const auto& sample : corpus.samples) {
    const auto prompt = build_prompt(sample, mode, a);
    rows << ojson{{"sample_id", sample.sample_id},
                  {"mode", std::string(to_string(mode))},
                  {"prompt", prompt.rendered},
                  {"target_text", sample.text}}
                .dump()
         << '\n';
  }
  if (!out.parent_path().empty()) ensure_dir(out.parent_path());
  write_file(out, rows.str());
  if (!assignment) return;

  ojson entries = ojson::array();
  for (const auto& [key, entry] : assignment->entries()) {
    entries.push_back({{"key", describe(key)},
                       {"demonstrator", entry.primary.sample.sample_id},
                       {"alternate", sample_id_json(entry.alternate)},
                       {"class_size", entry.class_size}});
  }
  ojson sidecar = {
      {"mode", std::string(to_string(mode))},
      {"order", std::string(to_string(policy.order))},
      {"self", std::string(to_string(policy.self))},
      {"seed", policy.seed},
      {"distinct_demonstrators", assignment->size()},
      {"entries", entries},
  };
  write_file(fs::path(out.string() + ".assignment.json"), sidecar.dump(2) + "\n");
}

std::vector<ScoreTable> score_generations(const Corpus& corpus,
                                          std::span<const GenerationRecord> records,
                                          const ScoreInputs& inputs) {
  const auto groups = group_references(corpus);
  std::optional<PairScoreTable> pairs;
  std::optional<EmbeddingTable> embeddings;
  std::optional<PredictionTable> predictions;
  auto needs = [&](Metric m) {
    return std::find(inputs.metrics.begin(), inputs.metrics.end(), m) != inputs.metrics.end();
  };
  if (inputs.pair_scores && needs(Metric::kBleurt)) pairs = PairScoreTable::load(*inputs.pair_scores);
  if (inputs.embeddings && needs(Metric::kLabse)) embeddings = EmbeddingTable::load(*inputs.embeddings);
  if (inputs.predictions && needs(Metric::kDac)) predictions = PredictionTable::load(*inputs.predictions);

  ScoringResources resources;
  resources.smoothing = inputs.smoothing;
  resources.pair_scores = pairs ? &*pairs : nullptr;
  resources.embeddings = embeddings ? &*embeddings : nullptr;
  resources.predictions = predictions ? &*predictions : nullptr;
  resources.dac_mode = inputs.dac_mode;
  resources.outputs_per_mr = inputs.outputs_per_mr;
  resources.jobs = inputs.jobs;
  return score_runs(groups, records, inputs.metrics, resources);
}

void write_scores(std::span<const ScoreTable> tables, const fs::path& out_dir) {
  ensure_dir(out_dir);
  std::ostringstream jsonl, csv;
  write_score_tables(tables, jsonl);
  write_score_summary_csv(tables, csv);
  write_file(out_dir / "score_tables.jsonl", jsonl.str());
  write_file(out_dir / "summary.csv", csv.str());
}

void export_requests(const Corpus& corpus, std::span<const GenerationRecord> records,
                     const fs::path& out_dir) {
  ensure_dir(out_dir);
  const auto groups = group_references(corpus);
  std::ostringstream sentences, pairs;
  write_sentence_requests(sentence_requests(groups, records), sentences);
  write_pair_requests(pair_requests(groups, records), pairs);
  write_file(out_dir / "sentences.jsonl", sentences.str());
  write_file(out_dir / "pairs.jsonl", pairs.str());
}

DacTrainResult train_dac(const Corpus& corpus, std::optional<DaLabelMode> mode,
                         double train_fraction, std::uint64_t seed,
                         const ClassifierOptions& options) {
  const DaLabelMode m = mode.value_or(detect_label_mode(corpus));
  const auto split = split_train_val(corpus, SplitSpec{train_fraction, seed});
  auto model = BagOfTokensClassifier::train(
      split.train, DaLabelSet::from_samples(split.train, m), options);
  std::vector<std::vector<std::string>> predicted, gold;
  for (const auto& s : split.validation) {
    predicted.push_back(model.predict(s.text));
    gold.push_back(gold_labels(s.mr, m));
  }
  DacTrainResult result{std::move(model), split.train.size(), split.validation.size(), {}, split};
  result.validation = dac_score(predicted, gold);
  return result;
}

void write_dac_split(const DacTrainResult& result, const fs::path& out_dir) {
  ensure_dir(out_dir);
  const auto mode = result.model.label_set().mode;
  auto rows = [&](const std::vector<CorpusSample>& samples) {
    std::ostringstream out;
    for (const auto& s : samples) {
      out << ojson{{"sample_id", s.sample_id},
                   {"mr", render_mr(s.mr)},
                   {"text", s.text},
                   {"labels", gold_labels(s.mr, mode)}}
                 .dump()
          << '\n';
    }
    return out.str();
  };
  write_file(out_dir / "train.jsonl", rows(result.split.train));
  write_file(out_dir / "validation.jsonl", rows(result.split.validation));
  const ojson labels = {{"mode", std::string(to_string(mode))},
                        {"labels", result.model.label_set().labels}};
  write_file(out_dir / "labels.json", labels.dump(2) + "\n");
}

std::string dac_summary_json(const DacTrainResult& r) {
  ojson doc = {
      {"mode", std::string(to_string(r.model.label_set().mode))},
      {"labels", r.model.label_set().labels.size()},
      {"vocabulary", r.model.vocabulary_size()},
      {"alpha", r.model.options().alpha},
      {"threshold", r.model.options().threshold},
      {"train_size", r.train_size},
      {"validation_size", r.validation_size},
      {"validation_accuracy", r.validation.accuracy},
      {"validation_weighted", r.validation.weighted},
  };
  return doc.dump(2) + "\n";
}

std::vector<Prediction> predict_generations(const BagOfTokensClassifier& model,
                                            std::span<const GenerationRecord> records,
                                            unsigned jobs) {
  std::vector<std::vector<Prediction>> per_record(records.size());
  parallel_for(records.size(), jobs, [&](std::size_t i) {
    const auto& rec = records[i];
    for (std::size_t k = 0; k < rec.outputs.size(); ++k) {
      per_record[i].push_back(
          {rec.sample_key, k, model.predict(rec.outputs[k]), rec.representation, rec.epoch});
    }
  });
  std::vector<Prediction> out;
  for (auto& v : per_record) {
    for (auto& p : v) out.push_back(std::move(p));
  }
  return out;
}

ReportInput analyze(const Corpus& corpus, std::span<const ScoreTable> tables, std::size_t bins,
                    const BucketScheme& references, const BucketScheme& attributes) {
  const auto groups = group_references(corpus);
  ReportInput input;
  input.curves = learning_curves(tables);
  for (const auto& t : tables) {
    input.distributions.push_back(score_distribution(t, bins));
    input.buckets.push_back(bucket_scores(t, groups, BucketAxis::kReferences, references));
    input.buckets.push_back(bucket_scores(t, groups, BucketAxis::kAttributes, attributes));
  }
  return input;
}

void write_synthetic(const fs::path& out_dir, std::uint64_t seed) {
  ensure_dir(out_dir);
  SyntheticSpec spec;
  spec.seed = seed;
  const Corpus corpus = synthetic_corpus(spec);
  const std::vector<PromptMode> modes{PromptMode::kBaseline, PromptMode::kP1, PromptMode::kP2,
                                      PromptMode::kP3};
  const auto records = synthetic_generations(corpus, modes, spec);
  const auto groups = group_references(corpus);

  std::ostringstream corpus_out, single_out, dac_out, gen_out, emb_out, pair_out;
  write_corpus_jsonl(corpus, corpus_out);
  write_corpus_jsonl(synthetic_single_da_corpus(40, seed), single_out);
  write_corpus_jsonl(synthetic_dac_corpus(1000, seed), dac_out);
  write_generations(records, gen_out);

  std::vector<std::pair<std::string, std::vector<double>>> embeddings;
  for (const auto& s : sentence_requests(groups, records)) {
    embeddings.emplace_back(s.id, synthetic_embedding(s.text));
  }
  write_embeddings(embeddings, emb_out);
  std::vector<std::pair<std::string, double>> pairs;
  for (const auto& p : pair_requests(groups, records)) {
    pairs.emplace_back(p.id, synthetic_pair_score(p.candidate, p.reference));
  }
  write_pair_scores(pairs, pair_out);

  write_file(out_dir / "corpus.jsonl", corpus_out.str());
  write_file(out_dir / "single_da.jsonl", single_out.str());
  write_file(out_dir / "dac_corpus.jsonl", dac_out.str());
  write_file(out_dir / "generations.jsonl", gen_out.str());
  write_file(out_dir / "embeddings.jsonl", emb_out.str());
  write_file(out_dir / "pair_scores.jsonl", pair_out.str());
  write_file(out_dir / "run.yaml",
             "# Synthetic end-to-end run. Paths are relative to this file.\n"
             "seed: " + std::to_string(seed) + "\n"
             "output: out\n"
             "corpus:\n"
             "  paths: [corpus.jsonl]\n"
             "prompts:\n"
             "  modes: [baseline, p1, p2, p3]\n"
             "  order: lexicographic\n"
             "  self: allow-self-fallback\n"
             "scoring:\n"
             "  generations: generations.jsonl\n"
             "  metrics: [bleu, bleurt, labse, slot-accuracy, dac]\n"
             "  pair_scores: pair_scores.jsonl\n"
             "  embeddings: embeddings.jsonl\n"
             "  outputs_per_mr: 5\n"
             "dac:\n"
             "  mode: auto\n"
             "  train_fraction: 0.95\n"
             "analysis:\n"
             "  bins: 50\n"
             "  formats: [csv, jsonl]\n");
}

void run_pipeline(const RunConfig& config, std::uint64_t seed, unsigned jobs) {
  const fs::path out = config.output;
  ensure_dir(out);
  const Corpus corpus = load_config_corpus(config);
  const auto references = BucketScheme::parse(config.reference_buckets);
  const auto attributes = BucketScheme::parse(config.attribute_buckets);

  write_stats(corpus, references, attributes, out / "stats");

  const SelectionPolicy policy{config.order, config.self, seed};
  for (PromptMode mode : config.prompt_modes) {
    write_prompts(corpus, mode, policy, out / "prompts" / (std::string(to_string(mode)) + ".jsonl"));
  }

  std::vector<GenerationRecord> records;
  if (config.generations) records = load_generations(*config.generations);

  std::vector<Metric> native;
  bool wants_dac = false;
  for (Metric m : config.metrics) {
    if (m == Metric::kDac) wants_dac = true;
    else native.push_back(m);
  }
  ScoreInputs inputs;
  inputs.pair_scores = config.pair_scores;
  inputs.embeddings = config.embeddings;
  inputs.dac_mode = config.dac_mode;
  inputs.outputs_per_mr = config.outputs_per_mr;
  inputs.smoothing = config.smoothing;
  inputs.jobs = jobs;

  std::vector<ScoreTable> tables;
  if (!records.empty() && !native.empty()) {
    inputs.metrics = native;
    tables = score_generations(corpus, records, inputs);
  }

  const Corpus dac_corpus = config.dac_corpus ? load_corpus(*config.dac_corpus) : corpus;
  const auto dac = train_dac(dac_corpus, config.dac_mode, config.train_fraction, seed,
                             config.classifier);
  ensure_dir(out / "dac");
  dac.model.save(out / "dac" / "model.json");
  write_file(out / "dac" / "validation.json", dac_summary_json(dac));
  write_dac_split(dac, out / "dac" / "split");
  if (!records.empty() && wants_dac) {
    inputs.predictions = config.predictions;
    if (!inputs.predictions) {
      std::ostringstream preds;
      write_predictions(predict_generations(dac.model, records, jobs), preds);
      inputs.predictions = out / "dac" / "predictions.jsonl";
      write_file(*inputs.predictions, preds.str());
    }
    if (!inputs.dac_mode) inputs.dac_mode = dac.model.label_set().mode;
    inputs.metrics = {Metric::kDac};
    for (auto& t : score_generations(corpus, records, inputs)) tables.push_back(std::move(t));
    std::sort(tables.begin(), tables.end(), [](const ScoreTable& a, const ScoreTable& b) {
      return std::tuple(a.metric, a.representation, a.epoch) <
             std::tuple(b.metric, b.representation, b.epoch);
    });
  }
  if (tables.empty()) return;
  write_scores(tables, out / "scores");

  const auto analysis = analyze(corpus, tables, config.bins, references, attributes);
  const ReportFormat jsonl[] = {ReportFormat::kJsonl};
  emit_report(analysis, out / "analysis", jsonl);
  emit_report(load_report(out / "analysis"), out / "report", config.formats);
}

}  // namespace danlg::cli

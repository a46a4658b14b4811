// danlg: dialogue-act NLG corpus, prompt and evaluation toolkit.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "danlg/error.hpp"

namespace fs = std::filesystem;
using namespace danlg;
using namespace danlg::cli;

namespace {

constexpr int kUnexpected = 1;

Corpus load_corpora(const std::vector<std::string>& paths, const std::string& format) {
  const auto f = parse_corpus_format(format);
  if (paths.size() == 1) return load_corpus(paths.front(), f);
  std::vector<fs::path> p(paths.begin(), paths.end());
  return load_corpus_files(p, f);
}

std::vector<GenerationRecord> load_all_generations(const std::vector<std::string>& paths) {
  std::vector<GenerationRecord> records;
  for (const auto& p : paths) {
    for (auto& r : load_generations(p)) records.push_back(std::move(r));
  }
  return records;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dialogue-act NLG toolkit: corpus stats, prompts, scoring and reports"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "danlg 0.1.0");

  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  std::string config_path;
  app.add_option("--seed", seed, "Seed for every random choice (overrides config and DA_NLG_KIT_SEED)");
  app.add_option("--jobs,-j", jobs, "Worker threads, 0 = all cores");
  app.add_option("--config,-c", config_path, "YAML run config")->check(CLI::ExistingFile);

  // stats
  auto* stats = app.add_subcommand("stats", "Corpus statistics as JSON on stdout");
  std::vector<std::string> corpus_paths;
  std::string corpus_format = "auto";
  std::string out_dir;
  std::string ref_buckets = "1,2,3,4,5,6-10,11-20,21-50,51-100,101-1000,>1000";
  std::string attr_buckets = "0,1,2,3,4,5,6,7,8+";
  stats->add_option("--corpus", corpus_paths, "Corpus file(s), concatenated in order");
  stats->add_option("--format", corpus_format, "auto, csv, jsonl or tsv");
  stats->add_option("--out", out_dir, "Also write stats.json and histogram CSVs here");
  stats->add_option("--reference-buckets", ref_buckets);
  stats->add_option("--attribute-buckets", attr_buckets);

  // prompts
  auto* prompts = app.add_subcommand("prompts", "Render prompts for one representation");
  std::string mode_name = "baseline", order_name = "lexicographic", self_name = "allow-self-fallback";
  std::string out_file;
  prompts->add_option("--corpus", corpus_paths);
  prompts->add_option("--format", corpus_format);
  prompts->add_option("--mode", mode_name, "baseline, p1, p2 or p3");
  prompts->add_option("--order", order_name, "lexicographic or seeded-random");
  prompts->add_option("--self", self_name, "allow-self-fallback or exclude-self");
  prompts->add_option("--out", out_file, "JSONL output; P-modes add <out>.assignment.json")->required();

  // score
  auto* score = app.add_subcommand("score", "Score generation files");
  std::vector<std::string> generation_paths, metric_names;
  std::string pair_scores, embeddings, predictions, export_dir, ref_length = "shortest";
  std::size_t outputs_per_mr = 5;
  std::string dac_mode_name = "auto";
  score->add_option("--corpus", corpus_paths);
  score->add_option("--format", corpus_format);
  score->add_option("--generations", generation_paths)->required();
  score->add_option("--metric", metric_names, "bleu, bleurt, labse, slot-accuracy, dac");
  score->add_option("--pair-scores", pair_scores);
  score->add_option("--embeddings", embeddings);
  score->add_option("--predictions", predictions);
  score->add_option("--outputs-per-mr", outputs_per_mr);
  score->add_option("--ref-length", ref_length, "shortest or closest");
  score->add_option("--dac-mode", dac_mode_name, "auto, multiclass or multilabel");
  score->add_option("--out", out_dir, "Directory for score_tables.jsonl and summary.csv");
  score->add_option("--export-requests", export_dir,
                    "Write sentences.jsonl and pairs.jsonl for external scorers and stop");

  // dac
  auto* dac = app.add_subcommand("dac", "Native dialogue-act classifier");
  dac->require_subcommand(1);
  auto* dac_train = dac->add_subcommand("train", "Train with a seeded 95/5 split");
  double train_fraction = 0.95;
  ClassifierOptions classifier;
  std::string model_path;
  dac_train->add_option("--corpus", corpus_paths);
  dac_train->add_option("--format", corpus_format);
  dac_train->add_option("--mode", dac_mode_name, "auto, multiclass or multilabel");
  dac_train->add_option("--train-fraction", train_fraction);
  dac_train->add_option("--alpha", classifier.alpha);
  dac_train->add_option("--threshold", classifier.threshold);
  dac_train->add_option("--out", model_path, "Model JSON")->required();
  dac_train->add_option("--seed", seed);
  std::string split_dir;
  dac_train->add_option("--export-split", split_dir,
                        "Write the train/validation split and label set as JSONL");
  auto* dac_eval = dac->add_subcommand("eval", "Predict DAs of generated outputs and score them");
  dac_eval->add_option("--model", model_path);
  dac_eval->add_option("--predictions", predictions, "External predictions instead of --model");
  dac_eval->add_option("--corpus", corpus_paths);
  dac_eval->add_option("--format", corpus_format);
  dac_eval->add_option("--generations", generation_paths)->required();
  dac_eval->add_option("--outputs-per-mr", outputs_per_mr);
  dac_eval->add_option("--mode", dac_mode_name);
  dac_eval->add_option("--threshold", classifier.threshold);
  dac_eval->add_option("--out", out_file, "Where native predictions are written");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Curves, distributions and bucketed views");
  std::string scores_path;
  std::size_t bins = 50;
  analyze_cmd->add_option("--corpus", corpus_paths);
  analyze_cmd->add_option("--format", corpus_format);
  analyze_cmd->add_option("--scores", scores_path, "score_tables.jsonl")->required();
  analyze_cmd->add_option("--bins", bins);
  analyze_cmd->add_option("--reference-buckets", ref_buckets);
  analyze_cmd->add_option("--attribute-buckets", attr_buckets);
  analyze_cmd->add_option("--out", out_dir)->required();

  // report
  auto* report = app.add_subcommand("report", "Emit plot-ready tables from an analysis directory");
  std::string analysis_dir;
  std::vector<std::string> formats{"csv", "jsonl"};
  report->add_option("--analysis", analysis_dir)->required();
  report->add_option("--formats", formats);
  report->add_option("--out", out_dir)->required();

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "stats, prompts, score, dac, analyze, report");
  std::string pipeline_out;
  pipeline->add_option("--config", config_path)->check(CLI::ExistingFile);
  pipeline->add_option("--out", pipeline_out, "Overrides the config output directory");
  pipeline->add_option("--seed", seed);
  pipeline->add_option("--jobs,-j", jobs);

  // synth
  auto* synth = app.add_subcommand("synth", "Write the synthetic fixtures");
  synth->add_option("--out", out_dir)->required();
  synth->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorFamily::kConfig);
  }

  try {
    std::optional<RunConfig> config;
    if (!config_path.empty()) config = load_config(config_path);
    const std::uint64_t run_seed = resolve_seed(seed, config ? &*config : nullptr);
    if (jobs == 0 && config) jobs = config->jobs;

    // Without --corpus, commands fall back to the config's corpus.
    auto corpus = [&]() -> Corpus {
      if (!corpus_paths.empty()) return load_corpora(corpus_paths, corpus_format);
      if (config) return load_config_corpus(*config);
      throw Error(ErrorCode::kConfig, "no corpus: pass --corpus or --config");
    };
    auto dac_mode = [&]() -> std::optional<DaLabelMode> {
      if (dac_mode_name == "auto") return config ? config->dac_mode : std::nullopt;
      return parse_label_mode(dac_mode_name);
    };

    if (*stats) {
      const auto c = corpus();
      const auto refs = BucketScheme::parse(ref_buckets);
      const auto attrs = BucketScheme::parse(attr_buckets);
      std::cout << stats_json(c, refs, attrs);
      if (!out_dir.empty()) write_stats(c, refs, attrs, out_dir);
    } else if (*prompts) {
      SelectionPolicy policy{parse_selection_order(order_name), parse_self_policy(self_name),
                             run_seed};
      write_prompts(corpus(), parse_prompt_mode(mode_name), policy, out_file);
    } else if (*score) {
      const auto c = corpus();
      const auto records = load_all_generations(generation_paths);
      if (!export_dir.empty()) {
        export_requests(c, records, export_dir);
        return 0;
      }
      ScoreInputs inputs;
      for (const auto& m : metric_names) inputs.metrics.push_back(parse_metric(m));
      if (inputs.metrics.empty()) inputs.metrics = config ? config->metrics : std::vector{Metric::kBleu};
      if (!pair_scores.empty()) inputs.pair_scores = pair_scores;
      else if (config) inputs.pair_scores = config->pair_scores;
      if (!embeddings.empty()) inputs.embeddings = embeddings;
      else if (config) inputs.embeddings = config->embeddings;
      if (!predictions.empty()) inputs.predictions = predictions;
      else if (config) inputs.predictions = config->predictions;
      inputs.dac_mode = dac_mode();
      inputs.outputs_per_mr = outputs_per_mr;
      if (ref_length == "closest") inputs.smoothing.ref_length = SmoothingSpec::RefLength::kClosest;
      else if (ref_length != "shortest") throw Error(ErrorCode::kConfig, "--ref-length must be shortest or closest");
      inputs.jobs = jobs;
      const auto tables = score_generations(c, records, inputs);
      if (!out_dir.empty()) write_scores(tables, out_dir);
      write_score_summary_csv(tables, std::cout);
    } else if (*dac_train) {
      const auto result = train_dac(corpus(), dac_mode(), train_fraction, run_seed, classifier);
      result.model.save(model_path);
      if (!split_dir.empty()) write_dac_split(result, split_dir);
      std::cout << dac_summary_json(result);
    } else if (*dac_eval) {
      const auto c = corpus();
      const auto records = load_all_generations(generation_paths);
      ScoreInputs inputs;
      inputs.metrics = {Metric::kDac};
      inputs.outputs_per_mr = outputs_per_mr;
      inputs.jobs = jobs;
      inputs.dac_mode = dac_mode();
      if (!model_path.empty()) {
        auto model = BagOfTokensClassifier::load(model_path);
        if (!inputs.dac_mode) inputs.dac_mode = model.label_set().mode;
        if (out_file.empty()) throw Error(ErrorCode::kConfig, "dac eval --model needs --out");
        std::ostringstream rows;
        write_predictions(predict_generations(model, records, jobs), rows);
        write_file(out_file, rows.str());
        inputs.predictions = fs::path(out_file);
      } else if (!predictions.empty()) {
        inputs.predictions = fs::path(predictions);
      } else {
        throw Error(ErrorCode::kConfig, "dac eval needs --model or --predictions");
      }
      write_score_summary_csv(score_generations(c, records, inputs), std::cout);
    } else if (*analyze_cmd) {
      const auto tables = load_score_tables(scores_path);
      const auto input = analyze(corpus(), tables, bins, BucketScheme::parse(ref_buckets),
                                 BucketScheme::parse(attr_buckets));
      const ReportFormat jsonl[] = {ReportFormat::kJsonl};
      emit_report(input, out_dir, jsonl);
    } else if (*report) {
      std::vector<ReportFormat> f;
      for (const auto& name : formats) f.push_back(parse_report_format(name));
      const auto manifest = emit_report(load_report(analysis_dir), out_dir, f);
      std::cout << manifest.files.size() << " files written to " << out_dir << '\n';
    } else if (*pipeline) {
      if (!config) throw Error(ErrorCode::kConfig, "pipeline needs --config");
      if (!pipeline_out.empty()) config->output = pipeline_out;
      run_pipeline(*config, run_seed, jobs);
    } else if (*synth) {
      write_synthetic(out_dir, seed.value_or(7));
    }
    return 0;
  } catch (const MalformedMr& e) {
    std::cerr << "danlg: malformed MR at byte " << e.position() << ": " << e.reason() << '\n';
    return static_cast<int>(ErrorFamily::kData);
  } catch (const Error& e) {
    std::cerr << "danlg: " << to_string(e.code()) << ": " << e.what() << '\n';
    return static_cast<int>(e.family());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "danlg: io: " << e.what() << '\n';
    return static_cast<int>(ErrorFamily::kIo);
  } catch (const std::exception& e) {
    std::cerr << "danlg: " << e.what() << '\n';
    return kUnexpected;
  }
}

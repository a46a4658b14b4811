#include "config.hpp"

#include <cstdlib>
#include <set>

#include <yaml-cpp/yaml.h>

#include "danlg/error.hpp"

namespace danlg::cli {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kConfig, where + ": " + what);
}

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(where, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(where, "bad value '" + YAML::Dump(node) + "'");
  }
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& where) {
  if (node.IsScalar()) return {node.as<std::string>()};
  if (!node.IsSequence()) fail(where, "expected a list");
  std::vector<std::string> out;
  for (const auto& item : node) out.push_back(scalar<std::string>(item, where));
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void require_file(const fs::path& path, const std::string& where) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kIo, where + ": file not found: " + path.string());
  }
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "jsonl") return ReportFormat::kJsonl;
  throw Error(ErrorCode::kConfig, "unknown report format '" + name + "'");
}

RunConfig load_config(const fs::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw Error(ErrorCode::kIo, "cannot read config '" + path.string() + "'");
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
  RunConfig c;
  c.base_dir = fs::absolute(path).parent_path();
  check_keys(root, "config", {"seed", "jobs", "output", "corpus", "prompts", "scoring", "dac",
                              "analysis"});

  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["jobs"]) c.jobs = scalar<unsigned>(root["jobs"], "jobs");
  if (root["output"]) c.output = resolve(c.base_dir, scalar<std::string>(root["output"], "output"));
  else c.output = c.base_dir / "out";

  const auto corpus = root["corpus"];
  if (!corpus) fail("config", "missing 'corpus' section");
  check_keys(corpus, "corpus", {"paths", "path", "format"});
  for (const char* key : {"paths", "path"}) {
    if (corpus[key]) {
      for (const auto& p : string_list(corpus[key], std::string("corpus.") + key)) {
        c.corpus_paths.push_back(resolve(c.base_dir, p));
      }
    }
  }
  if (c.corpus_paths.empty()) fail("corpus", "no corpus path");
  if (corpus["format"]) {
    c.corpus_format = parse_corpus_format(scalar<std::string>(corpus["format"], "corpus.format"));
  }

  if (const auto prompts = root["prompts"]) {
    check_keys(prompts, "prompts", {"modes", "order", "self"});
    if (prompts["modes"]) {
      c.prompt_modes.clear();
      for (const auto& m : string_list(prompts["modes"], "prompts.modes")) {
        c.prompt_modes.push_back(parse_prompt_mode(m));
      }
    }
    if (prompts["order"]) {
      c.order = parse_selection_order(scalar<std::string>(prompts["order"], "prompts.order"));
    }
    if (prompts["self"]) {
      c.self = parse_self_policy(scalar<std::string>(prompts["self"], "prompts.self"));
    }
  }

  if (const auto scoring = root["scoring"]) {
    check_keys(scoring, "scoring", {"generations", "metrics", "pair_scores", "embeddings",
                                    "predictions", "outputs_per_mr", "epsilon", "ref_length"});
    auto path_of = [&](const char* key) -> std::optional<fs::path> {
      if (!scoring[key]) return std::nullopt;
      auto p = resolve(c.base_dir, scalar<std::string>(scoring[key], std::string("scoring.") + key));
      require_file(p, std::string("scoring.") + key);
      return p;
    };
    c.generations = path_of("generations");
    c.pair_scores = path_of("pair_scores");
    c.embeddings = path_of("embeddings");
    c.predictions = path_of("predictions");
    if (scoring["metrics"]) {
      c.metrics.clear();
      for (const auto& m : string_list(scoring["metrics"], "scoring.metrics")) {
        c.metrics.push_back(parse_metric(m));
      }
    }
    if (scoring["outputs_per_mr"]) {
      c.outputs_per_mr = scalar<std::size_t>(scoring["outputs_per_mr"], "scoring.outputs_per_mr");
    }
    if (scoring["epsilon"]) c.smoothing.epsilon = scalar<double>(scoring["epsilon"], "scoring.epsilon");
    if (scoring["ref_length"]) {
      const auto rule = scalar<std::string>(scoring["ref_length"], "scoring.ref_length");
      if (rule == "shortest") c.smoothing.ref_length = SmoothingSpec::RefLength::kShortest;
      else if (rule == "closest") c.smoothing.ref_length = SmoothingSpec::RefLength::kClosest;
      else fail("scoring.ref_length", "expected shortest or closest");
    }
  }

  if (const auto dac = root["dac"]) {
    check_keys(dac, "dac", {"mode", "train_fraction", "alpha", "threshold", "corpus"});
    if (dac["mode"]) {
      const auto mode = scalar<std::string>(dac["mode"], "dac.mode");
      if (mode != "auto") c.dac_mode = parse_label_mode(mode);
    }
    if (dac["train_fraction"]) c.train_fraction = scalar<double>(dac["train_fraction"], "dac.train_fraction");
    if (dac["alpha"]) c.classifier.alpha = scalar<double>(dac["alpha"], "dac.alpha");
    if (dac["threshold"]) c.classifier.threshold = scalar<double>(dac["threshold"], "dac.threshold");
    if (dac["corpus"]) {
      c.dac_corpus = resolve(c.base_dir, scalar<std::string>(dac["corpus"], "dac.corpus"));
      require_file(*c.dac_corpus, "dac.corpus");
    }
  }

  if (const auto analysis = root["analysis"]) {
    check_keys(analysis, "analysis", {"bins", "reference_buckets", "attribute_buckets", "formats"});
    if (analysis["bins"]) c.bins = scalar<std::size_t>(analysis["bins"], "analysis.bins");
    if (analysis["reference_buckets"]) {
      c.reference_buckets = scalar<std::string>(analysis["reference_buckets"], "analysis.reference_buckets");
    }
    if (analysis["attribute_buckets"]) {
      c.attribute_buckets = scalar<std::string>(analysis["attribute_buckets"], "analysis.attribute_buckets");
    }
    if (analysis["formats"]) {
      c.formats.clear();
      for (const auto& f : string_list(analysis["formats"], "analysis.formats")) {
        c.formats.push_back(parse_report_format(f));
      }
    }
  }

  for (const auto& p : c.corpus_paths) require_file(p, "corpus");
  // Bucket specs are validated here so a typo fails before any work.
  BucketScheme::parse(c.reference_buckets);
  BucketScheme::parse(c.attribute_buckets);
  if (c.bins == 0) fail("analysis.bins", "must be positive");
  if (c.outputs_per_mr == 0) fail("scoring.outputs_per_mr", "must be positive");
  return c;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const RunConfig* config) {
  if (flag) return *flag;
  if (config != nullptr && config->seed) return *config->seed;
  if (const char* env = std::getenv("DA_NLG_KIT_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const auto value = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      throw Error(ErrorCode::kConfig, "DA_NLG_KIT_SEED is not an unsigned integer");
    }
    return value;
  }
  return 0;
}

}  // namespace danlg::cli

// Acceptance checks: one PASS/FAIL/SKIP line per criterion.
//
//   danlg_acceptance --cli <danlg> --fixtures <dir> --synthetic <dir> --work <dir>
//   danlg_acceptance --viggo-only ...   (needs DANLG_VIGGO_DIR; exit 77 when unset)

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "danlg/analysis.hpp"
#include "danlg/corpus_stats.hpp"
#include "danlg/dac.hpp"
#include "danlg/error.hpp"
#include "danlg/metrics.hpp"
#include "danlg/prompt.hpp"
#include "danlg/scoring.hpp"
#include "danlg/synthetic.hpp"
#include "oracle.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace danlg;

namespace {

struct Args {
  std::string cli;
  fs::path fixtures;
  fs::path synthetic;
  fs::path work;
  bool viggo_only = false;
};

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::kFail, std::move(d)}; }
Outcome skip(std::string d) { return {Status::kSkip, std::move(d)}; }

class Checker {
 public:
  explicit Checker(std::string& first_failure) : failure_(first_failure) {}
  // Records the first failed expectation; returns `ok`.
  bool expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
    return ok;
  }

 private:
  std::string& failure_;
};

std::vector<std::string> lines_of(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome parser_round_trip(const Args& args) {
  const auto published = lines_of(args.fixtures / "published_mrs.txt");
  const auto malformed = lines_of(args.fixtures / "malformed_mrs.txt");
  if (published.empty() || malformed.empty()) return fail("fixtures missing");
  std::string why;
  Checker c(why);
  for (const auto& line : published) {
    try {
      const auto mr = parse_mr(line);
      c.expect(parse_mr(render_mr(mr)) == mr, "round trip differs: " + line);
    } catch (const Error& e) {
      c.expect(false, "rejected: " + line + " (" + e.what() + ")");
    }
  }
  for (const auto& line : malformed) {
    try {
      parse_mr(line);
      c.expect(false, "accepted malformed: " + line);
    } catch (const MalformedMr&) {
    }
  }
  // Random structural round trips over awkward values.
  SplitMix64 rng(1);
  const std::vector<std::string> words{"The", "Vaults", "£30", "?", "yes", "2014", "x.y", "Café"};
  for (int i = 0; i < 2000 && why.empty(); ++i) {
    std::vector<DaGroup> groups(1 + rng.below(3));
    for (auto& g : groups) {
      g.da = "da_" + std::to_string(rng.below(4));
      for (std::size_t k = rng.below(4); k > 0; --k) {
        std::string v = testing::random_words(rng, words, 1, 3);
        if (rng.below(3) == 0) v += " (for Mature)";
        if (rng.below(3) == 0) v += ", shooter";
        g.slots.push_back({"attr " + std::to_string(rng.below(5)), v});
      }
    }
    const MeaningRepresentation mr(std::move(groups));
    c.expect(parse_mr(render_mr(mr)) == mr, "random round trip: " + render_mr(mr));
  }
  if (!why.empty()) return fail(why);
  return pass(std::to_string(published.size()) + " published MRs, " +
              std::to_string(malformed.size()) + " malformed fixtures, 2000 random MRs");
}

Outcome demonstrator_counts_synthetic(const Args&) {
  std::string why;
  Checker c(why);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto corpus = synthetic_corpus({.seed = seed, .num_mrs = 20 + seed % 40});
    std::set<std::vector<std::string>> signatures;
    for (const auto& s : corpus.samples) signatures.insert(s.mr.da_signature());
    const auto n1 = assign_demonstrators(corpus, PromptMode::kP1).size();
    const auto n2 = assign_demonstrators(corpus, PromptMode::kP2).size();
    const auto n3 = assign_demonstrators(corpus, PromptMode::kP3).size();
    c.expect(n1 == signatures.size(), "|P1| != signatures for seed " + std::to_string(seed));
    c.expect(n1 <= n2 && n2 <= n3, "specificity chain broken for seed " + std::to_string(seed));
  }
  if (!why.empty()) return fail(why);
  return pass("50 synthetic corpora; ViGGO counts checked by acceptance_viggo");
}

Outcome degenerate_mode(const Args& args) {
  try {
    assign_demonstrators(synthetic_single_da_corpus(), PromptMode::kP1);
    return fail("no error for P1 on a single-DA corpus");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateMode) return fail(std::string("wrong error: ") + e.what());
  }
  testing::ScratchDir dir("acc_degenerate");
  const std::string cmd = "\"" + args.cli + "\" prompts --mode p1 --corpus \"" +
                          (args.synthetic / "single_da.jsonl").string() + "\" --out \"" +
                          (dir / "p1.jsonl").string() + "\" >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (code != 4) return fail("CLI exit code " + std::to_string(code) + ", expected 4");
  return pass("library raises DegenerateMode; CLI exits 4");
}

Outcome slot_calibration(const Args&) {
  const auto crysis = slot_accuracy(
      parse_mr("inform(name=Crysis; release_year=2007; esrb=M (for Mature); rating=good; "
               "genres=action-adventure, shooter; has_multiplayer=yes)"),
      "Crysis is an action-adventure shooter released in 2007. It has received good reviews.");
  const auto cook =
      slot_accuracy(parse_mr("Gen_Open_question(action=cook; food=fish)"), "Do you like to cook fish?");
  const auto hello = slot_accuracy(parse_mr("Gen_Hello ( )"), "Hello!");
  if (!crysis || *crysis != 0.80) return fail("first vector: " + (crysis ? fmt(*crysis) : "absent"));
  if (!cook || *cook != 1.0) return fail("second vector: " + (cook ? fmt(*cook) : "absent"));
  if (hello) return fail("zero-attribute MR scored " + fmt(*hello));
  return pass("0.80, 1.00, absent");
}

Outcome bleu_properties(const Args&) {
  using Refs = std::vector<std::string>;
  std::string why;
  Checker c(why);
  SplitMix64 rng(3);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f", "g"};
  for (int i = 0; i < 200; ++i) {
    const auto s = testing::random_words(rng, vocab, 1, 15);
    c.expect(std::abs(bleu4(s, Refs{s}) - 1.0) <= 1e-9, "identity: " + s);
  }
  const double disjoint =
      bleu4("alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu",
            Refs{"one two three four five six seven eight nine ten eleven twelve"});
  c.expect(disjoint < 0.01, "disjoint scored " + fmt(disjoint));
  // Frozen from tests/oracles/oracles.py.
  c.expect(std::abs(bleu4("the quick brown fox jumps",
                          Refs{"the quick brown dog jumps", "a fast brown fox leaps"}) -
                    0.3303164318013807) <= 1e-9,
           "oracle example");
  c.expect(std::abs(bleu4("Crysis is an action-adventure shooter released in 2007.",
                          Refs{"Crysis is a 2007 action-adventure shooter.",
                               "Released in 2007, Crysis is an action-adventure shooter game."}) -
                    0.7476743906106103) <= 1e-9,
           "oracle example (punctuation)");
  for (int i = 0; i < 1000; ++i) {
    const auto cand = testing::random_words(rng, vocab, 1, 12);
    Refs refs;
    for (std::size_t r = 1 + rng.below(3); r > 0; --r) refs.push_back(testing::random_words(rng, vocab, 1, 14));
    const double before = bleu4(cand, refs);
    refs.push_back(testing::random_words(rng, vocab, 1, 14));
    c.expect(bleu4(cand, refs) >= before - 1e-12, "adding a reference lowered: " + cand);
  }
  if (!why.empty()) return fail(why);
  return pass("identity, disjoint " + fmt(disjoint) + ", oracle 1e-9, 1000 monotonicity cases");
}

Outcome aggregation_oracle(const Args&) {
  std::string why;
  Checker c(why);
  SplitMix64 rng(2025);
  const std::vector<PromptMode> modes{PromptMode::kBaseline, PromptMode::kP1, PromptMode::kP2,
                                      PromptMode::kP3};
  const Metric metrics[] = {Metric::kBleu, Metric::kSlotAccuracy, Metric::kBleurt, Metric::kLabse};
  double worst_mr = 0.0, worst_avg = 0.0, worst_bucket = 0.0;
  for (int run = 0; run < 200; ++run) {
    const SyntheticSpec spec{.seed = rng.next(),
                             .num_mrs = 8 + rng.below(30),
                             .outputs_per_mr = 1 + rng.below(5),
                             .epochs = 1};
    const auto corpus = synthetic_corpus(spec);
    const auto groups = group_references(corpus);
    const auto records = synthetic_generations(corpus, modes, spec);
    const auto cell = testing::cell(records, modes[rng.below(4)], static_cast<int>(rng.below(2)));
    const auto external = testing::synthetic_resources(groups, cell);
    ScoringResources res;
    res.pair_scores = &external.pairs;
    res.embeddings = &external.embeddings;
    res.outputs_per_mr = spec.outputs_per_mr;
    const Metric metric = metrics[run % 4];

    const auto table = score_run(groups, cell, metric, res);
    const auto oracle = testing::nested_mean_oracle(groups, cell, metric, res);
    c.expect(table.per_mr.size() == oracle.per_mr.size(), "MR sets differ in run " + std::to_string(run));
    for (const auto& [key, value] : oracle.per_mr) {
      const auto it = table.per_mr.find(key);
      if (!c.expect(it != table.per_mr.end(), "missing MR " + key)) break;
      worst_mr = std::max(worst_mr, std::abs(it->second - value));
    }
    worst_avg = std::max(worst_avg, std::abs(table.average - oracle.average));
    for (const auto axis : {BucketAxis::kReferences, BucketAxis::kAttributes}) {
      const auto scheme =
          axis == BucketAxis::kReferences ? BucketScheme::references() : BucketScheme::attributes();
      const auto view = bucket_scores(table, groups, axis, scheme);
      worst_bucket = std::max(worst_bucket, std::abs(testing::weighted_bucket_mean(view) - table.average));
    }
  }
  c.expect(worst_mr <= 1e-12, "per_mr deviation " + fmt(worst_mr));
  c.expect(worst_avg <= 1e-12, "average deviation " + fmt(worst_avg));
  c.expect(worst_bucket <= 1e-9, "bucket deviation " + fmt(worst_bucket));
  if (!why.empty()) return fail(why);
  return pass("200 runs; max |dev| per_mr " + fmt(worst_mr) + ", average " + fmt(worst_avg) +
              ", buckets " + fmt(worst_bucket));
}

Outcome native_dac(const Args&) {
  const auto corpus = synthetic_dac_corpus(1000);
  const auto split = split_train_val(corpus, {.train_fraction = 0.95, .seed = 0});
  const auto model = BagOfTokensClassifier::train(split.train, DaLabelMode::kMulticlass);
  std::vector<std::vector<std::string>> pred, gold;
  for (const auto& s : split.validation) {
    pred.push_back(model.predict(s.text));
    gold.push_back(gold_labels(s.mr, DaLabelMode::kMulticlass));
  }
  const auto score = dac_score(pred, gold);
  if (split.validation.size() != 50) return fail("validation size " + std::to_string(split.validation.size()));
  if (score.accuracy < 0.95) return fail("validation accuracy " + fmt(score.accuracy));

  // dac_score against a flat recount on random prediction sets.
  SplitMix64 rng(6);
  const std::vector<std::string> labels = model.label_set().labels;
  for (int round = 0; round < 500; ++round) {
    const auto n = 1 + rng.below(60);
    std::vector<std::vector<std::string>> p(n), g(n);
    std::size_t exact = 0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = {testing::pick(rng, labels)};
      p[i] = rng.below(2) ? g[i] : std::vector<std::string>{testing::pick(rng, labels)};
      if (rng.below(5) == 0) p[i].push_back(testing::pick(rng, labels));
      exact += std::set(p[i].begin(), p[i].end()) == std::set(g[i].begin(), g[i].end());
    }
    const double flat = static_cast<double>(exact) / static_cast<double>(n);
    if (dac_score(p, g).accuracy != flat) return fail("recount mismatch in round " + std::to_string(round));
  }
  return pass("validation accuracy " + fmt(score.accuracy) + " on " +
              std::to_string(split.validation.size()) + " held-out; 500 recounts agree");
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return files;
}

Outcome determinism(const Args& args) {
  const fs::path root = args.work / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = args.synthetic / "run.yaml";
  if (!fs::exists(config)) return fail("missing " + config.string());
  for (const char* name : {"run1", "run2"}) {
    const std::string cmd = "\"" + args.cli + "\" pipeline --config \"" + config.string() +
                            "\" --seed 7 --out \"" + (root / name).string() + "\" >\"" +
                            (root / (std::string(name) + ".log")).string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      return fail(std::string("pipeline ") + name + " failed; see " + (root / name).string() + ".log");
    }
  }
  const auto a = snapshot(root / "run1");
  const auto b = snapshot(root / "run2");
  if (!a.count("report/manifest.json")) return fail("no report manifest");
  if (a != b) {
    for (const auto& [file, content] : a) {
      const auto it = b.find(file);
      if (it == b.end() || it->second != content) return fail("differs: " + file);
    }
    return fail("file sets differ");
  }
  std::size_t bytes = 0;
  for (const auto& [file, content] : a) bytes += content.size();
  return pass(std::to_string(a.size()) + " files, " + std::to_string(bytes) + " bytes identical");
}

// ---------------------------------------------------------------------------
// ViGGO criteria. The distribution ships train/valid/test CSVs (mr, ref).

std::optional<Corpus> load_viggo(std::string& why) {
  const char* dir = std::getenv("DANLG_VIGGO_DIR");
  if (dir == nullptr || *dir == '\0') {
    why = "DANLG_VIGGO_DIR not set";
    return std::nullopt;
  }
  std::vector<fs::path> files;
  for (const char* name : {"train.csv", "valid.csv", "test.csv"}) {
    if (fs::exists(fs::path(dir) / name)) files.push_back(fs::path(dir) / name);
  }
  if (files.empty()) {
    why = std::string("no train/valid/test CSV in ") + dir;
    return std::nullopt;
  }
  return load_corpus_files(files, CorpusFormat::kCsvMrRef);
}

Outcome viggo_demonstrators(const Corpus& viggo) {
  const auto n1 = assign_demonstrators(viggo, PromptMode::kP1).size();
  const auto n2 = assign_demonstrators(viggo, PromptMode::kP2).size();
  const auto n3 = assign_demonstrators(viggo, PromptMode::kP3).size();
  const std::string got = std::to_string(n1) + "/" + std::to_string(n2) + "/" + std::to_string(n3);
  if (n1 != 9 || n2 != 21 || n3 != 473) return fail("P1/P2/P3 = " + got + ", expected 9/21/473");
  return pass("P1/P2/P3 = " + got);
}

Outcome viggo_stats(const Corpus& viggo) {
  const auto s = compute_stats(viggo);
  const auto hist = reference_histogram(group_references(viggo));
  double in_three = 0.0;
  for (std::size_t i = 0; i < hist.buckets.size(); ++i) {
    if (hist.buckets[i].label == "3") in_three = hist.percentages()[i];
  }
  const std::string got = "das " + std::to_string(s.num_das) + ", attributes " +
                          std::to_string(s.num_attributes) + ", size " +
                          std::to_string(s.corpus_size) + ", bucket 3 " + fmt(in_three) + "%";
  const bool ok = s.num_das == 9 && s.num_attributes == 14 &&
                  std::abs(static_cast<double>(s.corpus_size) - 6900.0) <= 0.05 * 6900.0 &&
                  in_three >= 99.0;
  return ok ? pass(got) : fail(got);
}

// ---------------------------------------------------------------------------

Args parse_args(int argc, char** argv) {
  Args a;
  for (int i = 1; i < argc; ++i) {
    const std::string k = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << k << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (k == "--cli") a.cli = next();
    else if (k == "--fixtures") a.fixtures = next();
    else if (k == "--synthetic") a.synthetic = next();
    else if (k == "--work") a.work = next();
    else if (k == "--viggo-only") a.viggo_only = true;
    else {
      std::cerr << "unknown argument " << k << "\n";
      std::exit(2);
    }
  }
  if (a.work.empty()) a.work = fs::temp_directory_path() / "danlg_acceptance";
  fs::create_directories(a.work);
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  const Args args = parse_args(argc, argv);
  int failures = 0;
  int skips = 0;
  auto report = [&](const std::string& name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    failures += o.status == Status::kFail;
    skips += o.status == Status::kSkip;
    std::cout << tag << "  " << name << "  (" << o.detail << "; " << fmt(secs) << "s)\n";
  };

  if (args.viggo_only) {
    std::string why;
    const auto viggo = load_viggo(why);
    if (!viggo) {
      report("demonstrator_counts_viggo", [&] { return skip(why); });
      report("corpus_stats_viggo", [&] { return skip(why); });
      return failures ? 1 : 77;
    }
    report("demonstrator_counts_viggo", [&] { return viggo_demonstrators(*viggo); });
    report("corpus_stats_viggo", [&] { return viggo_stats(*viggo); });
    return failures ? 1 : 0;
  }

  report("parser_round_trip", [&] { return parser_round_trip(args); });
  report("demonstrator_counts", [&] { return demonstrator_counts_synthetic(args); });
  report("degenerate_mode", [&] { return degenerate_mode(args); });
  report("slot_accuracy_calibration", [&] { return slot_calibration(args); });
  report("corpus_stats", [&] {
    return skip("needs the ViGGO distribution; checked by acceptance_viggo");
  });
  report("bleu_properties", [&] { return bleu_properties(args); });
  report("aggregation_oracle", [&] { return aggregation_oracle(args); });
  report("native_dac", [&] { return native_dac(args); });
  report("determinism", [&] { return determinism(args); });
  std::cout << (failures ? "FAILED" : "OK") << "  " << failures << " failed, " << skips
            << " skipped\n";
  return failures ? 1 : 0;
}

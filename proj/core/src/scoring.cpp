#include "danlg/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "danlg/corpus.hpp"
#include "danlg/error.hpp"
#include "danlg/parallel.hpp"
#include "danlg/text.hpp"

namespace danlg {
namespace {

using nlohmann::json;

const ReferenceGroup& require_group(const GenerationContext& context) {
  if (context.group == nullptr) {
    throw Error(ErrorCode::kConfig, "metric needs the reference group of the generation");
  }
  return *context.group;
}

DaLabelMode detect_mode(std::span<const ReferenceGroup> groups) {
  for (const auto& g : groups) {
    if (g.mr.groups().size() > 1) return DaLabelMode::kMultilabel;
  }
  return DaLabelMode::kMulticlass;
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kBleu: return "bleu";
    case Metric::kBleurt: return "bleurt";
    case Metric::kLabse: return "labse";
    case Metric::kSlotAccuracy: return "slot-accuracy";
    case Metric::kDac: return "dac";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n == "bleu" || n == "bleu4" || n == "bleu-4") return Metric::kBleu;
  if (n == "bleurt") return Metric::kBleurt;
  if (n == "labse" || n == "cosine") return Metric::kLabse;
  if (n == "slot-accuracy" || n == "slot_accuracy" || n == "sa") return Metric::kSlotAccuracy;
  if (n == "dac") return Metric::kDac;
  throw Error(ErrorCode::kConfig, "unknown metric '" + n + "'");
}

std::vector<Metric> all_metrics() {
  return {Metric::kBleu, Metric::kBleurt, Metric::kLabse, Metric::kSlotAccuracy, Metric::kDac};
}

std::string convention_for(Metric metric, const ScoringResources& resources) {
  switch (metric) {
    case Metric::kBleu: return describe(resources.smoothing) + " multi-reference-clipping";
    case Metric::kBleurt: return "pair-file mean-over-references";
    case Metric::kLabse: return "embedding-cosine mean-over-references";
    case Metric::kSlotAccuracy: return resources.convention.describe();
    case Metric::kDac:
      return resources.dac_mode ? "exact-label-match " + std::string(to_string(*resources.dac_mode))
                                : std::string("exact-label-match");
  }
  return {};
}

double generation_score(std::string_view candidate, std::span<const std::string> references,
                        Metric metric, const ScoringResources& resources) {
  if (references.empty()) throw Error(ErrorCode::kEmptyInput, "no reference");
  std::vector<double> scores;
  switch (metric) {
    case Metric::kBleu:
      return bleu4(candidate, references, resources.smoothing);
    case Metric::kBleurt:
      if (resources.pair_scores == nullptr) {
        throw Error(ErrorCode::kConfig, "bleurt needs a pair-score file");
      }
      for (const auto& ref : references) scores.push_back(resources.pair_scores->lookup(candidate, ref));
      break;
    case Metric::kLabse: {
      if (resources.embeddings == nullptr) {
        throw Error(ErrorCode::kConfig, "labse needs an embedding file");
      }
      const auto& c = resources.embeddings->lookup(candidate);
      for (const auto& ref : references) scores.push_back(cosine(c, resources.embeddings->lookup(ref)));
      break;
    }
    case Metric::kSlotAccuracy:
    case Metric::kDac:
      throw Error(ErrorCode::kConfig,
                  std::string(to_string(metric)) + " is not scored against references");
  }
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  // Rounding must not push the mean outside the observed range.
  return std::clamp(order_free_mean(scores), *lo, *hi);
}

std::optional<double> generation_score(std::string_view candidate,
                                       const GenerationContext& context, Metric metric,
                                       const ScoringResources& resources,
                                       std::optional<DaLabelMode> dac_mode) {
  const ReferenceGroup& group = require_group(context);
  switch (metric) {
    case Metric::kSlotAccuracy:
      return slot_accuracy(group.mr, candidate, resources.convention);
    case Metric::kDac: {
      if (resources.predictions == nullptr) {
        throw Error(ErrorCode::kConfig, "dac needs a prediction file");
      }
      const auto* predicted = resources.predictions->find(group.mr_key, context.output_index,
                                                          context.representation, context.epoch);
      if (predicted == nullptr) {
        throw Error(ErrorCode::kMissingPrediction,
                    "no prediction for '" + group.mr_key + "' output " +
                        std::to_string(context.output_index));
      }
      const DaLabelMode mode =
          dac_mode.value_or(resources.dac_mode.value_or(DaLabelMode::kMulticlass));
      return dac_correct(*predicted, gold_labels(group.mr, mode)) ? 1.0 : 0.0;
    }
    default:
      return generation_score(candidate, group.references, metric, resources);
  }
}

double order_free_mean(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "mean of no values");
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

ScoreTable score_run(std::span<const ReferenceGroup> groups,
                     std::span<const GenerationRecord> records, Metric metric,
                     const ScoringResources& resources) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no generation records");
  std::unordered_map<std::string_view, const ReferenceGroup*> by_key;
  for (const auto& g : groups) by_key.emplace(g.mr_key, &g);

  ScoreTable table;
  table.metric = metric;
  table.representation = records.front().representation;
  table.epoch = records.front().epoch;

  std::vector<const ReferenceGroup*> resolved(records.size());
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.representation != table.representation || rec.epoch != table.epoch) {
      throw Error(ErrorCode::kConfig, "score_run records span several (representation, epoch) cells");
    }
    auto it = by_key.find(rec.sample_key);
    if (it == by_key.end()) {
      throw Error(ErrorCode::kUnknownSampleKey, "no reference group for '" + rec.sample_key + "'");
    }
    if (rec.outputs.size() != resources.outputs_per_mr) {
      throw Error(ErrorCode::kIncompleteRecord,
                  "'" + rec.sample_key + "' has " + std::to_string(rec.outputs.size()) +
                      " outputs, expected " + std::to_string(resources.outputs_per_mr));
    }
    if (!seen.insert(rec.sample_key).second) {
      throw Error(ErrorCode::kDuplicateRecord,
                  "'" + rec.sample_key + "' appears twice in " +
                      std::string(to_string(table.representation)) + " epoch " +
                      std::to_string(table.epoch));
    }
    resolved[i] = it->second;
  }

  const DaLabelMode dac_mode = resources.dac_mode.value_or(detect_mode(groups));
  ScoringResources effective = resources;
  effective.dac_mode = dac_mode;
  table.convention = convention_for(metric, effective);

  std::vector<std::vector<std::optional<double>>> scores(records.size());
  parallel_for(records.size(), resources.jobs, [&](std::size_t i) {
    const auto& rec = records[i];
    auto& out = scores[i];
    out.reserve(rec.outputs.size());
    if (metric == Metric::kBleu) {
      // Tokenize the references once per MR rather than once per output.
      std::vector<TokenList> refs;
      for (const auto& r : resolved[i]->references) refs.push_back(word_tokenize(r));
      for (const auto& output : rec.outputs) {
        out.push_back(bleu4_tokens(word_tokenize(output), refs, resources.smoothing));
      }
      return;
    }
    for (std::size_t k = 0; k < rec.outputs.size(); ++k) {
      GenerationContext ctx{resolved[i], k, rec.representation, rec.epoch};
      out.push_back(generation_score(rec.outputs[k], ctx, metric, resources, dac_mode));
    }
  });

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    std::vector<double> kept;
    for (std::size_t k = 0; k < scores[i].size(); ++k) {
      if (!scores[i][k]) continue;
      if (!std::isfinite(*scores[i][k])) {
        throw Error(ErrorCode::kFormat, "non-finite score for '" + rec.sample_key + "'");
      }
      table.per_generation[{rec.sample_key, k}] = *scores[i][k];
      kept.push_back(*scores[i][k]);
    }
    if (kept.empty()) continue;  // slot accuracy without countable values
    table.per_mr[rec.sample_key] = order_free_mean(kept);
    table.mr_fold[rec.sample_key] = rec.fold;
  }
  if (table.per_mr.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "no scorable MR for " + std::string(to_string(metric)) + " in " +
                    std::string(to_string(table.representation)) + " epoch " +
                    std::to_string(table.epoch));
  }

  std::vector<double> all;
  std::map<int, std::vector<double>> by_fold;
  for (const auto& [key, score] : table.per_mr) {
    all.push_back(score);
    by_fold[table.mr_fold.at(key)].push_back(score);
  }
  table.average = order_free_mean(all);
  std::vector<double> fold_values;
  for (auto& [fold, values] : by_fold) {
    table.fold_averages[fold] = order_free_mean(values);
    fold_values.push_back(table.fold_averages[fold]);
  }
  table.fold_mean = order_free_mean(fold_values);
  return table;
}

std::vector<ScoreTable> score_runs(std::span<const ReferenceGroup> groups,
                                   std::span<const GenerationRecord> records,
                                   std::span<const Metric> metrics,
                                   const ScoringResources& resources) {
  std::map<std::pair<PromptMode, int>, std::vector<GenerationRecord>> cells;
  for (const auto& rec : records) cells[{rec.representation, rec.epoch}].push_back(rec);
  std::vector<ScoreTable> tables;
  for (Metric metric : metrics) {
    for (const auto& [cell, cell_records] : cells) {
      tables.push_back(score_run(groups, cell_records, metric, resources));
    }
  }
  std::sort(tables.begin(), tables.end(), [](const ScoreTable& a, const ScoreTable& b) {
    return std::tuple(a.metric, a.representation, a.epoch) <
           std::tuple(b.metric, b.representation, b.epoch);
  });
  return tables;
}

void write_score_tables(std::span<const ScoreTable> tables, std::ostream& out) {
  for (const auto& t : tables) {
    json gens = json::array();
    for (const auto& [key, score] : t.per_generation) gens.push_back({key.first, key.second, score});
    json folds = json::object();
    for (const auto& [fold, avg] : t.fold_averages) folds[std::to_string(fold)] = avg;
    json row = {
        {"metric", std::string(to_string(t.metric))},
        {"representation", std::string(to_string(t.representation))},
        {"epoch", t.epoch},
        {"convention", t.convention},
        {"average", t.average},
        {"fold_mean", t.fold_mean},
        {"fold_averages", folds},
        {"per_mr", t.per_mr},
        {"mr_fold", t.mr_fold},
        {"per_generation", gens},
    };
    out << row.dump() << '\n';
  }
}

std::vector<ScoreTable> parse_score_tables(std::string_view content) {
  std::vector<ScoreTable> tables;
  std::size_t row = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    const auto line = trim(content.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ScoreTable t;
      t.metric = parse_metric(j.at("metric").get<std::string>());
      t.representation = parse_prompt_mode(j.at("representation").get<std::string>());
      t.epoch = j.at("epoch").get<int>();
      t.convention = j.at("convention").get<std::string>();
      t.average = j.at("average").get<double>();
      t.fold_mean = j.at("fold_mean").get<double>();
      for (const auto& [fold, avg] : j.at("fold_averages").items()) {
        t.fold_averages[std::stoi(fold)] = avg.get<double>();
      }
      t.per_mr = j.at("per_mr").get<std::map<std::string, double>>();
      t.mr_fold = j.at("mr_fold").get<std::map<std::string, int>>();
      for (const auto& g : j.at("per_generation")) {
        t.per_generation[{g.at(0).get<std::string>(), g.at(1).get<std::size_t>()}] =
            g.at(2).get<double>();
      }
      tables.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw FormatError(row, e.what());
    } catch (const std::invalid_argument& e) {
      throw FormatError(row, "bad fold key");
    } catch (const Error& e) {
      if (dynamic_cast<const FormatError*>(&e)) throw;
      throw FormatError(row, e.what());
    }
    ++row;
  }
  return tables;
}

std::vector<ScoreTable> load_score_tables(const std::filesystem::path& path) {
  return parse_score_tables(read_file(path));
}

void write_score_summary_csv(std::span<const ScoreTable> tables, std::ostream& out) {
  out << "metric,representation,epoch,average,fold_mean,mrs,generations,convention\n";
  for (const auto& t : tables) {
    out << to_string(t.metric) << ',' << to_string(t.representation) << ',' << t.epoch << ','
        << format_number(t.average) << ',' << format_number(t.fold_mean) << ','
        << t.per_mr.size() << ',' << t.per_generation.size() << ','
        << csv_escape(t.convention) << '\n';
  }
}

namespace {

std::unordered_map<std::string_view, const ReferenceGroup*> index_groups(
    std::span<const ReferenceGroup> groups) {
  std::unordered_map<std::string_view, const ReferenceGroup*> by_key;
  for (const auto& g : groups) by_key.emplace(g.mr_key, &g);
  return by_key;
}

const ReferenceGroup& resolve(
    const std::unordered_map<std::string_view, const ReferenceGroup*>& by_key,
    const std::string& key) {
  auto it = by_key.find(key);
  if (it == by_key.end()) {
    throw Error(ErrorCode::kUnknownSampleKey, "no reference group for '" + key + "'");
  }
  return *it->second;
}

}  // namespace

std::vector<SentenceRequest> sentence_requests(std::span<const ReferenceGroup> groups,
                                               std::span<const GenerationRecord> records) {
  const auto by_key = index_groups(groups);
  std::map<std::string, std::string> rows;
  for (const auto& rec : records) {
    const auto& group = resolve(by_key, rec.sample_key);
    for (const auto& s : rec.outputs) rows.emplace(sentence_id(s), normalize_space(s));
    for (const auto& s : group.references) rows.emplace(sentence_id(s), normalize_space(s));
  }
  std::vector<SentenceRequest> out;
  for (auto& [id, text] : rows) out.push_back({id, text});
  return out;
}

std::vector<PairRequest> pair_requests(std::span<const ReferenceGroup> groups,
                                       std::span<const GenerationRecord> records) {
  const auto by_key = index_groups(groups);
  std::map<std::string, std::pair<std::string, std::string>> rows;
  for (const auto& rec : records) {
    const auto& group = resolve(by_key, rec.sample_key);
    for (const auto& c : rec.outputs) {
      for (const auto& r : group.references) {
        rows.emplace(pair_id(c, r), std::pair(normalize_space(c), normalize_space(r)));
      }
    }
  }
  std::vector<PairRequest> out;
  for (auto& [id, pair] : rows) out.push_back({id, pair.first, pair.second});
  return out;
}

void write_sentence_requests(std::span<const SentenceRequest> rows, std::ostream& out) {
  for (const auto& r : rows) out << json{{"id", r.id}, {"text", r.text}}.dump() << '\n';
}

void write_pair_requests(std::span<const PairRequest> rows, std::ostream& out) {
  for (const auto& r : rows) {
    out << json{{"id", r.id}, {"candidate", r.candidate}, {"reference", r.reference}}.dump()
        << '\n';
  }
}

}  // namespace danlg

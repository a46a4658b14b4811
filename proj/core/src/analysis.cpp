#include "danlg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "danlg/corpus.hpp"
#include "danlg/error.hpp"
#include "danlg/text.hpp"

namespace danlg {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view extension(ReportFormat format) {
  return format == ReportFormat::kCsv ? "csv" : "jsonl";
}

std::string stem(Metric metric, PromptMode rep, const std::string& view) {
  return std::string(to_string(metric)) + "_" + std::string(to_string(rep)) + "_" + view;
}

std::string epoch_view(std::string_view prefix, int epoch) {
  return std::string(prefix) + "_e" + std::to_string(epoch);
}

// A table of string cells; numbers already formatted. Empty optional = no value.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<std::string>>> rows;
  std::vector<bool> numeric;  // per column, for JSONL typing
};

std::string render_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c > 0) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      if (row[c]) out += csv_escape(*row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string render_jsonl(const Table& t) {
  std::string out;
  for (const auto& row : t.rows) {
    // Column order is kept by writing the object by hand.
    out += '{';
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += json(t.columns[c]).dump();
      out += ':';
      if (!row[c]) {
        out += "null";
      } else if (t.numeric[c]) {
        out += *row[c];
      } else {
        out += json(*row[c]).dump();
      }
    }
    out += "}\n";
  }
  return out;
}

std::vector<std::vector<std::optional<std::string>>> read_rows(const fs::path& path,
                                                               ReportFormat format,
                                                               const std::vector<std::string>& columns) {
  const std::string content = read_file(path);
  std::vector<std::vector<std::optional<std::string>>> rows;
  if (format == ReportFormat::kCsv) {
    const auto cells = parse_csv(content);
    if (cells.empty() || cells.front() != columns) {
      throw Error(ErrorCode::kFormat, path.string() + ": unexpected header");
    }
    for (std::size_t r = 1; r < cells.size(); ++r) {
      if (cells[r].size() != columns.size()) throw FormatError(r - 1, "wrong column count");
      std::vector<std::optional<std::string>> row;
      for (const auto& cell : cells[r]) {
        row.push_back(cell.empty() ? std::nullopt : std::optional<std::string>(cell));
      }
      rows.push_back(std::move(row));
    }
    return rows;
  }
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const json j = json::parse(line);
    std::vector<std::optional<std::string>> row;
    for (const auto& col : columns) {
      const auto& v = j.at(col);
      if (v.is_null()) {
        row.emplace_back();
      } else if (v.is_string()) {
        row.emplace_back(v.get<std::string>());
      } else if (v.is_number_float()) {
        row.emplace_back(format_number(v.get<double>()));
      } else {
        row.emplace_back(v.dump());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t to_size(const std::optional<std::string>& cell) {
  if (!cell) throw Error(ErrorCode::kFormat, "missing integer cell");
  const double v = parse_number(*cell);
  if (v < 0 || v != std::floor(v)) throw Error(ErrorCode::kFormat, "not a count: " + *cell);
  return static_cast<std::size_t>(v);
}

const std::vector<std::string> kCurveColumns{"epoch", "average", "fold_mean", "mrs"};
const std::vector<std::string> kDistributionColumns{"bin", "lower", "upper", "count"};
const std::vector<std::string> kBucketColumns{"bucket", "lower", "upper", "count", "mean"};

Table curve_table(const CurveSeries& s) {
  Table t{kCurveColumns, {}, {true, true, true, true}};
  for (const auto& p : s.points) {
    t.rows.push_back({std::to_string(p.epoch), format_number(p.average),
                      format_number(p.fold_mean), std::to_string(p.mrs)});
  }
  return t;
}

Table distribution_table(const ScoreDistribution& d) {
  Table t{kDistributionColumns, {}, {true, true, true, true}};
  const double width = 1.0 / static_cast<double>(d.bins());
  for (std::size_t i = 0; i < d.bins(); ++i) {
    t.rows.push_back({std::to_string(i), format_number(static_cast<double>(i) * width),
                      format_number(i + 1 == d.bins() ? 1.0 : static_cast<double>(i + 1) * width),
                      std::to_string(d.counts[i])});
  }
  return t;
}

Table bucket_table(const BucketedScores& b) {
  Table t{kBucketColumns, {}, {false, true, true, true, true}};
  for (const auto& row : b.rows) {
    t.rows.push_back({row.bucket.label, std::to_string(row.bucket.lower),
                      row.bucket.upper ? std::optional<std::string>(std::to_string(*row.bucket.upper))
                                       : std::nullopt,
                      std::to_string(row.count),
                      row.mean ? std::optional<std::string>(format_number(*row.mean))
                               : std::nullopt});
  }
  return t;
}

// Parses "distribution_e3" into ("distribution", 3); "curve" gives ("curve", -1).
std::pair<std::string, int> split_view(const std::string& view) {
  const auto pos = view.rfind("_e");
  if (pos == std::string::npos) return {view, -1};
  return {view.substr(0, pos), static_cast<int>(parse_number(view.substr(pos + 2)))};
}

}  // namespace

std::vector<CurveSeries> learning_curves(std::span<const ScoreTable> tables) {
  std::map<std::pair<Metric, PromptMode>, std::map<int, const ScoreTable*>> cells;
  for (const auto& t : tables) {
    if (!cells[{t.metric, t.representation}].emplace(t.epoch, &t).second) {
      throw Error(ErrorCode::kDuplicateCell,
                  std::string(to_string(t.metric)) + "/" + std::string(to_string(t.representation)) +
                      " epoch " + std::to_string(t.epoch) + " appears twice");
    }
  }
  std::vector<CurveSeries> series;
  for (const auto& [key, by_epoch] : cells) {
    CurveSeries s{key.first, key.second, {}};
    for (const auto& [epoch, t] : by_epoch) {
      s.points.push_back({epoch, t->average, t->fold_mean, t->per_mr.size()});
    }
    series.push_back(std::move(s));
  }
  return series;
}

std::string_view to_string(BucketAxis axis) {
  return axis == BucketAxis::kReferences ? "references" : "attributes";
}

BucketAxis parse_bucket_axis(std::string_view name) {
  if (name == "references") return BucketAxis::kReferences;
  if (name == "attributes") return BucketAxis::kAttributes;
  throw Error(ErrorCode::kConfig, "unknown bucket axis '" + std::string(name) + "'");
}

BucketedScores bucket_scores(const ScoreTable& table, std::span<const ReferenceGroup> groups,
                             BucketAxis axis, const BucketScheme& scheme) {
  std::unordered_map<std::string_view, const ReferenceGroup*> by_key;
  for (const auto& g : groups) by_key.emplace(g.mr_key, &g);

  std::vector<std::vector<double>> members(scheme.buckets().size());
  for (const auto& [key, score] : table.per_mr) {
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw Error(ErrorCode::kUnresolvableKey, "no reference group for '" + key + "'");
    }
    const std::size_t value = axis == BucketAxis::kReferences ? it->second->references.size()
                                                              : it->second->mr.attribute_count();
    const auto index = scheme.index_of(value);
    if (!index) {
      throw Error(ErrorCode::kUnresolvableKey,
                  "'" + key + "' has " + std::to_string(value) + " " +
                      std::string(to_string(axis)) + ", outside every bucket");
    }
    members[*index].push_back(score);
  }
  BucketedScores out{table.metric, table.representation, table.epoch, axis, {}};
  for (std::size_t i = 0; i < members.size(); ++i) {
    BucketRow row{scheme.buckets()[i], members[i].size(), std::nullopt};
    if (!members[i].empty()) row.mean = order_free_mean(members[i]);
    out.rows.push_back(std::move(row));
  }
  return out;
}

ScoreDistribution score_distribution(const ScoreTable& table, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::kConfig, "distribution needs at least one bin");
  if (table.per_mr.empty()) throw Error(ErrorCode::kEmptyInput, "no MR scores");
  ScoreDistribution d{table.metric, table.representation, table.epoch,
                      std::vector<std::size_t>(bins, 0)};
  for (const auto& [key, score] : table.per_mr) {
    const double s = std::clamp(score, 0.0, 1.0);
    const auto index = std::min(static_cast<std::size_t>(s * static_cast<double>(bins)), bins - 1);
    ++d.counts[index];
  }
  return d;
}

Manifest emit_report(const ReportInput& input, const fs::path& out_dir,
                     std::span<const ReportFormat> formats) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error(ErrorCode::kIo, "cannot create report directory '" + out_dir.string() + "'");
  }
  std::set<ReportFormat> wanted(formats.begin(), formats.end());

  Manifest manifest;
  auto emit = [&](Metric metric, PromptMode rep, const std::string& view, const Table& table) {
    for (ReportFormat format : wanted) {
      const std::string file = stem(metric, rep, view) + "." + std::string(extension(format));
      write_file(out_dir / file,
                 format == ReportFormat::kCsv ? render_csv(table) : render_jsonl(table));
      manifest.files.push_back({file, view, metric, rep, format, table.rows.size()});
    }
  };
  for (const auto& s : input.curves) emit(s.metric, s.representation, "curve", curve_table(s));
  for (const auto& d : input.distributions) {
    emit(d.metric, d.representation, epoch_view("distribution", d.epoch), distribution_table(d));
  }
  for (const auto& b : input.buckets) {
    emit(b.metric, b.representation, epoch_view("by_" + std::string(to_string(b.axis)), b.epoch),
         bucket_table(b));
  }
  std::sort(manifest.files.begin(), manifest.files.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.file < b.file; });
  for (std::size_t i = 1; i < manifest.files.size(); ++i) {
    if (manifest.files[i].file == manifest.files[i - 1].file) {
      throw Error(ErrorCode::kDuplicateCell, "two artifacts map to " + manifest.files[i].file);
    }
  }

  json files = json::array();
  for (const auto& e : manifest.files) {
    files.push_back({{"file", e.file},
                     {"view", e.view},
                     {"metric", std::string(to_string(e.metric))},
                     {"representation", std::string(to_string(e.representation))},
                     {"format", std::string(extension(e.format))},
                     {"rows", e.rows}});
  }
  json doc = {{"schema_version", Manifest::kSchemaVersion}, {"files", files}};
  write_file(out_dir / "manifest.json", doc.dump(2) + "\n");
  return manifest;
}

Manifest load_manifest(const fs::path& out_dir) {
  try {
    const json doc = json::parse(read_file(out_dir / "manifest.json"));
    if (doc.at("schema_version").get<int>() != Manifest::kSchemaVersion) {
      throw Error(ErrorCode::kFormat, "unsupported manifest schema version");
    }
    Manifest m;
    for (const auto& f : doc.at("files")) {
      const auto format = f.at("format").get<std::string>();
      if (format != "csv" && format != "jsonl") {
        throw Error(ErrorCode::kFormat, "unknown report format '" + format + "'");
      }
      m.files.push_back({f.at("file").get<std::string>(), f.at("view").get<std::string>(),
                         parse_metric(f.at("metric").get<std::string>()),
                         parse_prompt_mode(f.at("representation").get<std::string>()),
                         format == "csv" ? ReportFormat::kCsv : ReportFormat::kJsonl,
                         f.at("rows").get<std::size_t>()});
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad manifest: ") + e.what());
  }
}

ReportInput load_report(const fs::path& out_dir) {
  const Manifest manifest = load_manifest(out_dir);
  const bool has_csv = std::any_of(manifest.files.begin(), manifest.files.end(),
                                   [](const ManifestEntry& e) { return e.format == ReportFormat::kCsv; });
  const ReportFormat use = has_csv ? ReportFormat::kCsv : ReportFormat::kJsonl;

  ReportInput input;
  try {
    for (const auto& e : manifest.files) {
      if (e.format != use) continue;
      const auto [kind, epoch] = split_view(e.view);
      if (kind == "curve") {
        CurveSeries s{e.metric, e.representation, {}};
        for (const auto& row : read_rows(out_dir / e.file, use, kCurveColumns)) {
          s.points.push_back({static_cast<int>(to_size(row[0])), parse_number(row[1].value()),
                              parse_number(row[2].value()), to_size(row[3])});
        }
        input.curves.push_back(std::move(s));
      } else if (kind == "distribution") {
        ScoreDistribution d{e.metric, e.representation, epoch, {}};
        for (const auto& row : read_rows(out_dir / e.file, use, kDistributionColumns)) {
          d.counts.push_back(to_size(row[3]));
        }
        input.distributions.push_back(std::move(d));
      } else if (kind == "by_references" || kind == "by_attributes") {
        BucketedScores b{e.metric, e.representation, epoch,
                         parse_bucket_axis(kind.substr(3)), {}};
        for (const auto& row : read_rows(out_dir / e.file, use, kBucketColumns)) {
          BucketRow r;
          r.bucket.label = row[0].value_or("");
          r.bucket.lower = to_size(row[1]);
          if (row[2]) r.bucket.upper = to_size(row[2]);
          r.count = to_size(row[3]);
          if (row[4]) r.mean = parse_number(*row[4]);
          b.rows.push_back(std::move(r));
        }
        input.buckets.push_back(std::move(b));
      } else {
        throw Error(ErrorCode::kFormat, "unknown view '" + e.view + "'");
      }
    }
  } catch (const std::bad_optional_access&) {
    throw Error(ErrorCode::kFormat, "missing value in a report table");
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kFormat, std::string("bad report row: ") + ex.what());
  }

  std::sort(input.curves.begin(), input.curves.end(), [](const auto& a, const auto& b) {
    return std::tuple(a.metric, a.representation) < std::tuple(b.metric, b.representation);
  });
  std::sort(input.distributions.begin(), input.distributions.end(),
            [](const auto& a, const auto& b) {
              return std::tuple(a.metric, a.representation, a.epoch) <
                     std::tuple(b.metric, b.representation, b.epoch);
            });
  std::sort(input.buckets.begin(), input.buckets.end(), [](const auto& a, const auto& b) {
    return std::tuple(a.metric, a.representation, a.epoch, a.axis) <
           std::tuple(b.metric, b.representation, b.epoch, b.axis);
  });
  return input;
}

}  // namespace danlg

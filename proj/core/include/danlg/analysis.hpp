#pragma once

// Learning curves, score distributions, bucketed views and their emission as
// plot-ready CSV/JSONL tables.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "danlg/corpus_stats.hpp"
#include "danlg/scoring.hpp"

namespace danlg {

struct CurvePoint {
  int epoch = 0;
  double average = 0.0;
  double fold_mean = 0.0;
  std::size_t mrs = 0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct CurveSeries {
  Metric metric = Metric::kBleu;
  PromptMode representation = PromptMode::kBaseline;
  std::vector<CurvePoint> points;  // strictly increasing epochs; gaps stay gaps

  friend bool operator==(const CurveSeries&, const CurveSeries&) = default;
};

/// One series per (metric, representation), sorted. Throws
/// Error(kDuplicateCell) when a (metric, representation, epoch) repeats.
std::vector<CurveSeries> learning_curves(std::span<const ScoreTable> tables);

enum class BucketAxis { kReferences, kAttributes };

std::string_view to_string(BucketAxis axis);
BucketAxis parse_bucket_axis(std::string_view name);

struct BucketRow {
  Bucket bucket;
  std::size_t count = 0;
  std::optional<double> mean;  // absent for empty buckets

  friend bool operator==(const BucketRow& a, const BucketRow& b) {
    return a.bucket.label == b.bucket.label && a.bucket.lower == b.bucket.lower &&
           a.bucket.upper == b.bucket.upper && a.count == b.count && a.mean == b.mean;
  }
};

struct BucketedScores {
  Metric metric = Metric::kBleu;
  PromptMode representation = PromptMode::kBaseline;
  int epoch = 0;
  BucketAxis axis = BucketAxis::kReferences;
  std::vector<BucketRow> rows;

  friend bool operator==(const BucketedScores&, const BucketedScores&) = default;
};

/// Unweighted per-bucket mean of the table's MR scores. The reference axis
/// uses the size of each MR's reference group, the attribute axis its slot
/// count. MRs without a score (slot accuracy absent) are not in per_mr and so
/// never counted. Throws Error(kUnresolvableKey) for an MR key with no group
/// or whose count falls outside the scheme.
BucketedScores bucket_scores(const ScoreTable& table, std::span<const ReferenceGroup> groups,
                             BucketAxis axis, const BucketScheme& scheme);

struct ScoreDistribution {
  Metric metric = Metric::kBleu;
  PromptMode representation = PromptMode::kBaseline;
  int epoch = 0;
  std::vector<std::size_t> counts;  // bin i covers [i/bins, (i+1)/bins)

  std::size_t bins() const noexcept { return counts.size(); }
  friend bool operator==(const ScoreDistribution&, const ScoreDistribution&) = default;
};

/// Histogram of per-MR scores over [0, 1]. The top bin is closed on the
/// right; scores outside [0, 1] (negative cosines) are clamped into the end
/// bins. Throws Error(kEmptyInput) for an empty table, Error(kConfig) for
/// bins == 0.
ScoreDistribution score_distribution(const ScoreTable& table, std::size_t bins = 50);

struct ReportInput {
  std::vector<CurveSeries> curves;
  std::vector<ScoreDistribution> distributions;
  std::vector<BucketedScores> buckets;

  friend bool operator==(const ReportInput&, const ReportInput&) = default;
};

enum class ReportFormat { kCsv, kJsonl };

struct ManifestEntry {
  std::string file;
  std::string view;
  Metric metric = Metric::kBleu;
  PromptMode representation = PromptMode::kBaseline;
  ReportFormat format = ReportFormat::kCsv;
  std::size_t rows = 0;
};

struct Manifest {
  static constexpr int kSchemaVersion = 1;
  std::vector<ManifestEntry> files;  // sorted by file name
};

/// Writes `{metric}_{representation}_{view}.{csv,jsonl}` per artifact and
/// manifest.json. Views: "curve", "distribution_e{N}", "by_references_e{N}",
/// "by_attributes_e{N}". Throws Error(kIo) when the directory is unusable.
Manifest emit_report(const ReportInput& input, const std::filesystem::path& out_dir,
                     std::span<const ReportFormat> formats);

/// Reads manifest.json back.
Manifest load_manifest(const std::filesystem::path& out_dir);

/// Rebuilds the artifacts from an emitted directory, preferring CSV files.
ReportInput load_report(const std::filesystem::path& out_dir);

}  // namespace danlg

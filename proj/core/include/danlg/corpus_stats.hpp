#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "danlg/corpus.hpp"
#include "danlg/text.hpp"

namespace danlg {

/// All references sharing one MR (structural identity via the canonical
/// render).
struct ReferenceGroup {
  std::string mr_key;
  MeaningRepresentation mr;
  std::vector<std::string> references;
  std::vector<std::size_t> sample_ids;
};

/// Groups in order of first appearance.
std::vector<ReferenceGroup> group_references(const Corpus& corpus);

struct CorpusStats {
  std::size_t num_das = 0;         // distinct DA signatures
  std::size_t num_simple_das = 0;  // distinct group DA names
  std::size_t num_attributes = 0;
  std::size_t num_mrs = 0;
  std::size_t corpus_size = 0;
  std::size_t running_words = 0;
  std::size_t vocabulary = 0;
};

/// Word counts use sentence tokens only; MR tokens are not counted.
CorpusStats compute_stats(const Corpus& corpus,
                          const Tokenizer& tokenizer = word_tokenize);

struct Bucket {
  std::string label;
  std::size_t lower = 0;
  std::optional<std::size_t> upper;  // inclusive; nullopt = unbounded

  bool contains(std::size_t value) const noexcept {
    return value >= lower && (!upper || value <= *upper);
  }
};

/// Contiguous, non-overlapping buckets starting at `lower` of the first one.
class BucketScheme {
 public:
  explicit BucketScheme(std::vector<Bucket> buckets);

  const std::vector<Bucket>& buckets() const noexcept { return buckets_; }
  /// Index of the bucket holding `value`, or nullopt below the first bucket.
  std::optional<std::size_t> index_of(std::size_t value) const noexcept;

  /// 1,2,3,4,5,6-10,11-20,21-50,51-100,101-1000,>1000
  static BucketScheme references();
  /// 0,1,...,7,8+
  static BucketScheme attributes();
  /// Parses "1,2,3,6-10,>1000" style specs; a trailing "N+" is also accepted.
  static BucketScheme parse(std::string_view spec);

 private:
  std::vector<Bucket> buckets_;
};

struct Histogram {
  std::vector<Bucket> buckets;
  std::vector<std::size_t> counts;

  std::size_t total() const noexcept;
  /// Percentages per bucket; all zero when total() == 0.
  std::vector<double> percentages() const;
};

Histogram attribute_histogram(const Corpus& corpus,
                              const BucketScheme& scheme = BucketScheme::attributes());
Histogram reference_histogram(const std::vector<ReferenceGroup>& groups,
                              const BucketScheme& scheme = BucketScheme::references());

}  // namespace danlg

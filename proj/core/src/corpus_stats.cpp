#include "danlg/corpus_stats.hpp"

#include <charconv>
#include <set>
#include <unordered_map>

#include "danlg/error.hpp"

namespace danlg {

std::vector<ReferenceGroup> group_references(const Corpus& corpus) {
  std::vector<ReferenceGroup> groups;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& sample : corpus.samples) {
    std::string key = render_mr(sample.mr);
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) {
      groups.push_back(ReferenceGroup{std::move(key), sample.mr, {}, {}});
    }
    auto& group = groups[it->second];
    group.references.push_back(sample.text);
    group.sample_ids.push_back(sample.sample_id);
  }
  return groups;
}

CorpusStats compute_stats(const Corpus& corpus, const Tokenizer& tokenizer) {
  std::set<std::vector<std::string>> signatures;
  std::set<std::string> simple_das;
  std::set<std::string> attributes;
  std::set<std::string> mrs;
  std::set<std::string> vocabulary;
  CorpusStats stats;
  for (const auto& sample : corpus.samples) {
    signatures.insert(sample.mr.da_signature());
    for (const auto& group : sample.mr.groups()) {
      simple_das.insert(group.da);
      for (const auto& slot : group.slots) attributes.insert(slot.attribute);
    }
    mrs.insert(render_mr(sample.mr));
    for (auto& token : tokenizer(sample.text)) {
      ++stats.running_words;
      vocabulary.insert(std::move(token));
    }
  }
  stats.num_das = signatures.size();
  stats.num_simple_das = simple_das.size();
  stats.num_attributes = attributes.size();
  stats.num_mrs = mrs.size();
  stats.corpus_size = corpus.samples.size();
  stats.vocabulary = vocabulary.size();
  return stats;
}

BucketScheme::BucketScheme(std::vector<Bucket> buckets)
    : buckets_(std::move(buckets)) {
  if (buckets_.empty()) throw Error(ErrorCode::kConfig, "empty bucket scheme");
  for (std::size_t i = 0; i < buckets_.size(); ++i) {
    const auto& b = buckets_[i];
    if (b.upper && *b.upper < b.lower) {
      throw Error(ErrorCode::kConfig, "bucket '" + b.label + "' is inverted");
    }
    if (i + 1 < buckets_.size()) {
      if (!b.upper || *b.upper + 1 != buckets_[i + 1].lower) {
        throw Error(ErrorCode::kConfig,
                    "buckets '" + b.label + "' and '" + buckets_[i + 1].label +
                        "' are not contiguous");
      }
    }
  }
}

std::optional<std::size_t> BucketScheme::index_of(std::size_t value) const noexcept {
  for (std::size_t i = 0; i < buckets_.size(); ++i) {
    if (buckets_[i].contains(value)) return i;
  }
  return std::nullopt;
}

BucketScheme BucketScheme::references() {
  return parse("1,2,3,4,5,6-10,11-20,21-50,51-100,101-1000,>1000");
}

BucketScheme BucketScheme::attributes() {
  return parse("0,1,2,3,4,5,6,7,8+");
}

BucketScheme BucketScheme::parse(std::string_view spec) {
  auto number = [&](std::string_view s) {
    s = trim(s);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw Error(ErrorCode::kConfig,
                  "bad bucket bound '" + std::string(s) + "'");
    }
    return v;
  };
  std::vector<Bucket> buckets;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view item = trim(spec.substr(start, end - start));
    Bucket b;
    b.label = std::string(item);
    if (!item.empty() && item.front() == '>') {
      b.lower = number(item.substr(1)) + 1;
    } else if (!item.empty() && item.back() == '+') {
      b.lower = number(item.substr(0, item.size() - 1));
    } else if (auto dash = item.find('-'); dash != std::string_view::npos) {
      b.lower = number(item.substr(0, dash));
      b.upper = number(item.substr(dash + 1));
    } else {
      b.lower = number(item);
      b.upper = b.lower;
    }
    buckets.push_back(std::move(b));
    start = end + 1;
  }
  return BucketScheme(std::move(buckets));
}

std::size_t Histogram::total() const noexcept {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::vector<double> Histogram::percentages() const {
  const auto n = total();
  std::vector<double> out(counts.size(), 0.0);
  if (n == 0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  return out;
}

namespace {

Histogram bin(const std::vector<std::size_t>& values, const BucketScheme& scheme) {
  Histogram h{scheme.buckets(), std::vector<std::size_t>(scheme.buckets().size(), 0)};
  for (auto v : values) {
    auto idx = scheme.index_of(v);
    // Values below the first bucket are clamped into it so that mass is
    // conserved.
    ++h.counts[idx.value_or(0)];
  }
  return h;
}

}  // namespace

Histogram attribute_histogram(const Corpus& corpus, const BucketScheme& scheme) {
  std::vector<std::size_t> values;
  for (const auto& group : group_references(corpus)) {
    values.push_back(group.mr.attribute_count());
  }
  return bin(values, scheme);
}

Histogram reference_histogram(const std::vector<ReferenceGroup>& groups,
                              const BucketScheme& scheme) {
  std::vector<std::size_t> values;
  values.reserve(groups.size());
  for (const auto& group : groups) values.push_back(group.references.size());
  return bin(values, scheme);
}

}  // namespace danlg

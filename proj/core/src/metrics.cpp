#include "danlg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "danlg/error.hpp"
#include "danlg/text.hpp"

namespace danlg {
namespace {

using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts count_ngrams(const TokenList& tokens, int n) {
  NgramCounts counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::size_t effective_ref_length(std::size_t candidate_length,
                                 std::span<const TokenList> references,
                                 SmoothingSpec::RefLength rule) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& ref : references) {
    if (ref.empty()) continue;
    const std::size_t len = ref.size();
    if (best == std::numeric_limits<std::size_t>::max()) {
      best = len;
      continue;
    }
    if (rule == SmoothingSpec::RefLength::kShortest) {
      best = std::min(best, len);
    } else {
      const auto dist = [&](std::size_t r) {
        return r > candidate_length ? r - candidate_length : candidate_length - r;
      };
      if (dist(len) < dist(best) || (dist(len) == dist(best) && len < best)) {
        best = len;
      }
    }
  }
  return best;
}

bool is_boolean(std::string_view v) { return v == "yes" || v == "no"; }

}  // namespace

std::string describe(const SmoothingSpec& spec) {
  return "bleu-" + std::to_string(spec.max_order) + " add-epsilon=" +
         format_number(spec.epsilon) + " ref-length=" +
         (spec.ref_length == SmoothingSpec::RefLength::kShortest ? "shortest"
                                                                 : "closest");
}

double bleu4_tokens(const TokenList& candidate, std::span<const TokenList> references,
                    const SmoothingSpec& spec) {
  if (candidate.empty()) throw Error(ErrorCode::kEmptyInput, "empty candidate");
  const bool any_ref = std::any_of(references.begin(), references.end(),
                                   [](const TokenList& r) { return !r.empty(); });
  if (!any_ref) throw Error(ErrorCode::kEmptyInput, "no non-empty reference");

  double log_precision = 0.0;
  for (int n = 1; n <= spec.max_order; ++n) {
    const NgramCounts cand = count_ngrams(candidate, n);
    NgramCounts max_ref;
    for (const auto& ref : references) {
      for (const auto& [gram, count] : count_ngrams(ref, n)) {
        auto& slot = max_ref[gram];
        slot = std::max(slot, count);
      }
    }
    long clipped = 0;
    for (const auto& [gram, count] : cand) {
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) clipped += std::min(count, it->second);
    }
    const long total = std::max<long>(0, static_cast<long>(candidate.size()) - n + 1);
    const double precision =
        clipped > 0 ? static_cast<double>(clipped) / static_cast<double>(total)
                    : spec.epsilon / (static_cast<double>(total) + spec.epsilon);
    log_precision += std::log(precision) / spec.max_order;
  }
  const double c = static_cast<double>(candidate.size());
  const double r =
      static_cast<double>(effective_ref_length(candidate.size(), references, spec.ref_length));
  const double log_bp = c >= r ? 0.0 : 1.0 - r / c;
  return std::exp(log_precision + log_bp);
}

double bleu4(std::string_view candidate, std::span<const std::string> references,
             const SmoothingSpec& spec) {
  std::vector<TokenList> refs;
  refs.reserve(references.size());
  for (const auto& r : references) refs.push_back(word_tokenize(r));
  return bleu4_tokens(word_tokenize(candidate), refs, spec);
}

std::string MatchConvention::describe() const {
  std::string out = "slot-match: exclude={";
  for (std::size_t i = 0; i < excluded_values.size(); ++i) {
    if (i > 0) out += ",";
    out += excluded_values[i];
  }
  out += "}";
  if (exclude_booleans) out += " exclude-booleans";
  out += comma_parts_all_required ? " comma-parts=all" : " comma-parts=whole";
  return out;
}

std::optional<double> slot_accuracy(const MeaningRepresentation& mr,
                                    std::string_view generation,
                                    const MatchConvention& convention) {
  const std::string haystack = normalize_for_match(generation);
  std::size_t countable = 0;
  std::size_t matched = 0;
  for (const auto& group : mr.groups()) {
    for (const auto& slot : group.slots) {
      const std::string normalized = normalize_for_match(slot.value);
      if (std::find(convention.excluded_values.begin(),
                    convention.excluded_values.end(),
                    normalized) != convention.excluded_values.end()) {
        continue;
      }
      const std::string value = strip_enclosing_punctuation(normalized);
      if (value.empty()) continue;
      if (convention.exclude_booleans && is_boolean(value)) continue;
      ++countable;

      std::vector<std::string> parts;
      if (convention.comma_parts_all_required) {
        std::size_t start = 0;
        while (start <= value.size()) {
          auto end = value.find(',', start);
          if (end == std::string::npos) end = value.size();
          std::string part =
              strip_enclosing_punctuation(trim(std::string_view(value).substr(start, end - start)));
          if (!part.empty()) parts.push_back(std::move(part));
          start = end + 1;
        }
      } else {
        parts.push_back(value);
      }
      const bool all_found =
          !parts.empty() && std::all_of(parts.begin(), parts.end(), [&](const std::string& p) {
            return haystack.find(p) != std::string::npos;
          });
      if (all_found) ++matched;
    }
  }
  if (countable == 0) return std::nullopt;
  return static_cast<double>(matched) / static_cast<double>(countable);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace danlg

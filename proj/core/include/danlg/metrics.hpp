#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "danlg/mr.hpp"

namespace danlg {

/// Sentence-level BLEU-4 configuration.
///
/// Zero n-gram matches are smoothed by adding `epsilon` to numerator and
/// denominator of that order's precision; non-zero precisions are left as is.
/// An order with no candidate n-grams (candidate shorter than n) therefore
/// contributes epsilon/epsilon = 1.
struct SmoothingSpec {
  enum class RefLength {
    kShortest,  // NIST; adding a reference never lowers the score
    kClosest,   // Papineni; ties go to the shorter reference
  };

  double epsilon = 0.1;
  RefLength ref_length = RefLength::kShortest;
  int max_order = 4;
};

std::string describe(const SmoothingSpec& spec);

/// Multi-reference BLEU over word_tokenize() tokens. Counts are clipped by the
/// per-n-gram maximum over references. Empty references are ignored.
/// Throws Error(kEmptyInput) for an empty candidate or when no reference has
/// tokens.
double bleu4(std::string_view candidate, std::span<const std::string> references,
             const SmoothingSpec& spec = {});

using TokenList = std::vector<std::string>;

double bleu4_tokens(const TokenList& candidate, std::span<const TokenList> references,
                    const SmoothingSpec& spec = {});

/// Which slot values count and how they match a generated sentence.
struct MatchConvention {
  /// Normalized values never counted.
  std::vector<std::string> excluded_values{"?"};
  /// Drop yes/no (boolean) values; they are realized by paraphrase
  /// ("single-player only") rather than by the literal token.
  bool exclude_booleans = true;
  /// "action-adventure, shooter" is one value whose every comma-part must occur.
  bool comma_parts_all_required = true;

  std::string describe() const;
};

/// Fraction of countable slot values found in `generation`.
///
/// Both sides are lowercased, NFC-normalized and whitespace-collapsed; values
/// lose enclosing non-bracket punctuation; matching is substring containment.
/// Returns nullopt when nothing is countable (no attributes, or every value
/// excluded): such MRs are left out of slot-accuracy averages.
std::optional<double> slot_accuracy(const MeaningRepresentation& mr,
                                    std::string_view generation,
                                    const MatchConvention& convention = {});

/// dot(a,b) / (|a| |b|), clamped to [-1, 1].
/// Throws Error(kDimensionMismatch) or Error(kZeroVector).
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace danlg

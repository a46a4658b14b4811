#pragma once

// Seeded toy data: a small video-game corpus, fake model outputs across
// epochs, stand-in embeddings and pair scores, and a templated DA corpus.
// Everything is a pure function of the seed.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "danlg/corpus.hpp"
#include "danlg/records.hpp"

namespace danlg {

struct SyntheticSpec {
  std::uint64_t seed = 7;
  std::size_t num_mrs = 60;
  std::size_t outputs_per_mr = 5;
  int epochs = 5;  // generations cover epochs 0..epochs
};

/// Multi-DA corpus with 1 to 25 references per MR, one zero-slot MR,
/// "?" values and yes/no values.
Corpus synthetic_corpus(const SyntheticSpec& spec = {});

/// Single-DA corpus (every MR is `inform`), the shape that makes P1 degenerate.
Corpus synthetic_single_da_corpus(std::size_t samples = 40, std::uint64_t seed = 3);

/// One record per (MR, mode, epoch); folds assigned round-robin over MRs.
/// Output quality grows with the epoch and the prompt mode.
std::vector<GenerationRecord> synthetic_generations(const Corpus& corpus,
                                                    std::span<const PromptMode> modes,
                                                    const SyntheticSpec& spec = {});

/// Hashed bag-of-words vector; deterministic and never all-zero.
std::vector<double> synthetic_embedding(std::string_view sentence, std::size_t dimension = 16);

/// Unigram F1 between the two token bags, in [0, 1].
double synthetic_pair_score(std::string_view candidate, std::string_view reference);

/// Five DAs realized by distinct sentence templates; multiclass.
Corpus synthetic_dac_corpus(std::size_t samples = 1000, std::uint64_t seed = 11);

}  // namespace danlg

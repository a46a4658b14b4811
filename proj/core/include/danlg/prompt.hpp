#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "danlg/corpus.hpp"

namespace danlg {

enum class PromptMode { kBaseline, kP1, kP2, kP3 };

std::string_view to_string(PromptMode mode);
/// Accepts "baseline", "p1", "p2", "p3" (case-insensitive).
PromptMode parse_prompt_mode(std::string_view name);

/// Selection key for a demonstrator. P1 keys hold only the DA signature, P2
/// adds the attribute count, P3 the sorted attribute multiset.
struct DemoKey {
  std::vector<std::string> da_signature;
  std::optional<std::size_t> attr_count;
  std::optional<std::vector<std::string>> attr_multiset;

  friend bool operator==(const DemoKey&, const DemoKey&) = default;
  friend auto operator<=>(const DemoKey&, const DemoKey&) = default;
};

DemoKey demo_key(const MeaningRepresentation& mr, PromptMode mode);

/// Human-readable form, e.g. "give_opinion | n=4" or "inform | name,near".
std::string describe(const DemoKey& key);

struct SelectionPolicy {
  enum class Order { kLexicographic, kSeededRandom };
  enum class Self { kAllowSelfFallback, kExcludeSelf };

  Order order = Order::kLexicographic;
  Self self = Self::kAllowSelfFallback;
  std::uint64_t seed = 0;
};

SelectionPolicy::Order parse_selection_order(std::string_view name);
SelectionPolicy::Self parse_self_policy(std::string_view name);
std::string_view to_string(SelectionPolicy::Order order);
std::string_view to_string(SelectionPolicy::Self self);

struct Demonstrator {
  CorpusSample sample;
};

/// One demonstrator per distinct key. `alternate` is the next candidate of
/// the same key class under the policy order, used when the primary
/// demonstrator is the input sample itself.
class DemonstratorAssignment {
 public:
  struct Entry {
    Demonstrator primary;
    std::optional<Demonstrator> alternate;
    std::size_t class_size = 0;
  };

  DemonstratorAssignment(PromptMode mode, SelectionPolicy policy,
                         std::map<DemoKey, Entry> entries);

  PromptMode mode() const noexcept { return mode_; }
  const SelectionPolicy& policy() const noexcept { return policy_; }
  const std::map<DemoKey, Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const Entry* find(const DemoKey& key) const;

 private:
  PromptMode mode_;
  SelectionPolicy policy_;
  std::map<DemoKey, Entry> entries_;
};

/// Builds the key -> demonstrator map for a P-mode.
///
/// Lexicographic order picks the candidate with the smallest
/// (rendered MR, sentence, sample_id); seeded-random draws from a
/// SplitMix64 stream keyed by the policy seed, visiting keys in sorted order.
/// Throws Error(kDegenerateMode) when the corpus yields exactly one key: every
/// input would share the same demonstrator (the E2E case under P1).
DemonstratorAssignment assign_demonstrators(const Corpus& corpus, PromptMode mode,
                                            const SelectionPolicy& policy = {});

struct PromptTemplate {
  std::string plus_separator = " + ";
  std::string io_separator = "\n";
};

struct PromptInstance {
  MeaningRepresentation input_mr;
  PromptMode mode = PromptMode::kBaseline;
  std::optional<Demonstrator> demonstrator;
  std::string rendered;
};

struct PromptOptions {
  PromptTemplate prompt_template;
  /// Lower-specificity assignments tried in order when the input key is
  /// missing (e.g. P2 then P1 for a P3 prompt). Empty = no relaxation.
  std::span<const DemonstratorAssignment> relaxation;
};

/// Renders a prompt for a corpus sample. Self-handling follows the
/// assignment's policy: when the chosen demonstrator is the sample itself,
/// the alternate is used if one exists; otherwise the sample is its own
/// demonstrator (allow-self-fallback) or Error(kSelfDemonstrator) is thrown
/// (exclude-self). Throws Error(kMissingKey) for unseen keys.
PromptInstance build_prompt(const CorpusSample& input, PromptMode mode,
                            const DemonstratorAssignment* assignment,
                            const PromptOptions& options = {});

/// Same for a bare MR (inference time); no self check applies.
PromptInstance build_prompt(const MeaningRepresentation& input, PromptMode mode,
                            const DemonstratorAssignment* assignment,
                            const PromptOptions& options = {});

struct PromptParts {
  std::optional<MeaningRepresentation> demonstrator_mr;
  std::optional<std::string> demonstrator_text;
  MeaningRepresentation input_mr;
};

/// Inverse of the rendering. Throws MalformedMr when the text does not follow
/// the template.
PromptParts parse_prompt(std::string_view rendered, bool has_demonstrator,
                         const PromptTemplate& prompt_template = {});

}  // namespace danlg

#include "danlg/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

#include "danlg/error.hpp"
#include "danlg/random.hpp"

namespace danlg {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool same_sample(const CorpusSample& a, const CorpusSample& b) {
  return a.sample_id == b.sample_id && a.text == b.text && a.mr == b.mr;
}

PromptInstance render(const MeaningRepresentation& input, PromptMode mode,
                      std::optional<Demonstrator> demo,
                      const PromptTemplate& tmpl) {
  PromptInstance out{input, mode, std::move(demo), {}};
  if (!out.demonstrator) {
    out.rendered = render_mr(input);
    return out;
  }
  out.rendered = render_mr(out.demonstrator->sample.mr) + tmpl.plus_separator +
                 out.demonstrator->sample.text + tmpl.io_separator +
                 render_mr(input);
  return out;
}

const DemonstratorAssignment::Entry& lookup(const MeaningRepresentation& input,
                                            PromptMode mode,
                                            const DemonstratorAssignment* assignment,
                                            const PromptOptions& options) {
  if (assignment == nullptr) {
    throw Error(ErrorCode::kConfig,
                std::string("no demonstrator assignment for mode ") +
                    std::string(to_string(mode)));
  }
  if (assignment->mode() != mode) {
    throw Error(ErrorCode::kConfig, "assignment mode does not match prompt mode");
  }
  const DemoKey key = demo_key(input, mode);
  if (const auto* entry = assignment->find(key)) return *entry;
  for (const auto& fallback : options.relaxation) {
    if (const auto* entry = fallback.find(demo_key(input, fallback.mode()))) {
      return *entry;
    }
  }
  throw Error(ErrorCode::kMissingKey,
              "no demonstrator for key '" + describe(key) + "'");
}

}  // namespace

std::string_view to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::kBaseline: return "baseline";
    case PromptMode::kP1: return "p1";
    case PromptMode::kP2: return "p2";
    case PromptMode::kP3: return "p3";
  }
  return "baseline";
}

PromptMode parse_prompt_mode(std::string_view name) {
  const std::string n = lower(name);
  if (n == "baseline" || n == "base") return PromptMode::kBaseline;
  if (n == "p1" || n == "prompt1") return PromptMode::kP1;
  if (n == "p2" || n == "prompt2") return PromptMode::kP2;
  if (n == "p3" || n == "prompt3") return PromptMode::kP3;
  throw Error(ErrorCode::kConfig, "unknown prompt mode '" + std::string(name) + "'");
}

SelectionPolicy::Order parse_selection_order(std::string_view name) {
  if (name == "lexicographic") return SelectionPolicy::Order::kLexicographic;
  if (name == "seeded-random") return SelectionPolicy::Order::kSeededRandom;
  throw Error(ErrorCode::kConfig, "unknown selection policy '" + std::string(name) + "'");
}

SelectionPolicy::Self parse_self_policy(std::string_view name) {
  if (name == "allow-self-fallback") return SelectionPolicy::Self::kAllowSelfFallback;
  if (name == "exclude-self") return SelectionPolicy::Self::kExcludeSelf;
  throw Error(ErrorCode::kConfig, "unknown self policy '" + std::string(name) + "'");
}

std::string_view to_string(SelectionPolicy::Order order) {
  return order == SelectionPolicy::Order::kLexicographic ? "lexicographic"
                                                         : "seeded-random";
}

std::string_view to_string(SelectionPolicy::Self self) {
  return self == SelectionPolicy::Self::kAllowSelfFallback ? "allow-self-fallback"
                                                           : "exclude-self";
}

DemoKey demo_key(const MeaningRepresentation& mr, PromptMode mode) {
  DemoKey key;
  key.da_signature = mr.da_signature();
  switch (mode) {
    case PromptMode::kBaseline:
      throw Error(ErrorCode::kConfig, "baseline prompts have no demonstrator key");
    case PromptMode::kP1:
      break;
    case PromptMode::kP2:
      key.attr_count = mr.attribute_count();
      break;
    case PromptMode::kP3: {
      auto attrs = mr.attributes();
      std::sort(attrs.begin(), attrs.end());
      key.attr_multiset = std::move(attrs);
      break;
    }
  }
  return key;
}

std::string describe(const DemoKey& key) {
  std::string out;
  for (const auto& da : key.da_signature) {
    if (!out.empty()) out += " & ";
    out += da;
  }
  if (key.attr_count) out += " | n=" + std::to_string(*key.attr_count);
  if (key.attr_multiset) {
    out += " |";
    for (std::size_t i = 0; i < key.attr_multiset->size(); ++i) {
      out += i == 0 ? " " : ",";
      out += (*key.attr_multiset)[i];
    }
  }
  return out;
}

DemonstratorAssignment::DemonstratorAssignment(PromptMode mode,
                                               SelectionPolicy policy,
                                               std::map<DemoKey, Entry> entries)
    : mode_(mode), policy_(policy), entries_(std::move(entries)) {}

const DemonstratorAssignment::Entry* DemonstratorAssignment::find(
    const DemoKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

DemonstratorAssignment assign_demonstrators(const Corpus& corpus, PromptMode mode,
                                            const SelectionPolicy& policy) {
  if (mode == PromptMode::kBaseline) {
    throw Error(ErrorCode::kConfig, "baseline mode takes no demonstrators");
  }
  if (corpus.samples.empty()) throw Error(ErrorCode::kEmptyInput, "empty corpus");

  struct Candidate {
    std::string rendered;
    const CorpusSample* sample;
  };
  std::map<DemoKey, std::vector<Candidate>> classes;
  for (const auto& sample : corpus.samples) {
    classes[demo_key(sample.mr, mode)].push_back({render_mr(sample.mr), &sample});
  }
  if (classes.size() == 1) {
    throw Error(ErrorCode::kDegenerateMode,
                std::string(to_string(mode)) +
                    " assigns the same demonstrator to every MR of corpus '" +
                    corpus.name + "' (single key '" +
                    describe(classes.begin()->first) +
                    "'); the representation is discarded, as P1 is for single-DA corpora "
                    "such as E2E");
  }

  SplitMix64 rng(policy.seed);
  std::map<DemoKey, DemonstratorAssignment::Entry> entries;
  for (auto& [key, candidates] : classes) {
    std::size_t primary = 0;
    std::optional<std::size_t> alternate;
    if (policy.order == SelectionPolicy::Order::kLexicographic) {
      std::sort(candidates.begin(), candidates.end(),
                [](const Candidate& a, const Candidate& b) {
                  return std::tie(a.rendered, a.sample->text, a.sample->sample_id) <
                         std::tie(b.rendered, b.sample->text, b.sample->sample_id);
                });
      if (candidates.size() > 1) alternate = 1;
    } else {
      // Candidates are already in corpus order.
      primary = rng.below(candidates.size());
      if (candidates.size() > 1) {
        std::size_t pick = rng.below(candidates.size() - 1);
        alternate = pick >= primary ? pick + 1 : pick;
      }
    }
    DemonstratorAssignment::Entry entry{Demonstrator{*candidates[primary].sample},
                                        std::nullopt, candidates.size()};
    if (alternate) entry.alternate = Demonstrator{*candidates[*alternate].sample};
    entries.emplace(key, std::move(entry));
  }
  return DemonstratorAssignment(mode, policy, std::move(entries));
}

PromptInstance build_prompt(const CorpusSample& input, PromptMode mode,
                            const DemonstratorAssignment* assignment,
                            const PromptOptions& options) {
  if (mode == PromptMode::kBaseline) {
    return render(input.mr, mode, std::nullopt, options.prompt_template);
  }
  const auto& entry = lookup(input.mr, mode, assignment, options);
  const Demonstrator* chosen = &entry.primary;
  if (same_sample(entry.primary.sample, input)) {
    if (entry.alternate) {
      chosen = &*entry.alternate;
    } else if (assignment->policy().self == SelectionPolicy::Self::kExcludeSelf) {
      throw Error(ErrorCode::kSelfDemonstrator,
                  "sample " + std::to_string(input.sample_id) +
                      " is the only member of key '" +
                      describe(demo_key(input.mr, mode)) + "'");
    }
  }
  return render(input.mr, mode, *chosen, options.prompt_template);
}

PromptInstance build_prompt(const MeaningRepresentation& input, PromptMode mode,
                            const DemonstratorAssignment* assignment,
                            const PromptOptions& options) {
  if (mode == PromptMode::kBaseline) {
    return render(input, mode, std::nullopt, options.prompt_template);
  }
  const auto& entry = lookup(input, mode, assignment, options);
  return render(input, mode, entry.primary, options.prompt_template);
}

PromptParts parse_prompt(std::string_view rendered, bool has_demonstrator,
                         const PromptTemplate& tmpl) {
  if (!has_demonstrator) return PromptParts{std::nullopt, std::nullopt, parse_mr(rendered)};
  if (tmpl.plus_separator.empty() || tmpl.io_separator.empty()) {
    throw Error(ErrorCode::kConfig, "prompt separators must be non-empty");
  }
  for (auto plus = rendered.find(tmpl.plus_separator); plus != std::string_view::npos;
       plus = rendered.find(tmpl.plus_separator, plus + 1)) {
    std::optional<MeaningRepresentation> demo;
    try {
      demo = parse_mr(rendered.substr(0, plus));
    } catch (const MalformedMr&) {
      continue;
    }
    const std::size_t text_begin = plus + tmpl.plus_separator.size();
    for (auto io = rendered.rfind(tmpl.io_separator);
         io != std::string_view::npos && io >= text_begin;
         io = io == 0 ? std::string_view::npos : rendered.rfind(tmpl.io_separator, io - 1)) {
      try {
        auto input = parse_mr(rendered.substr(io + tmpl.io_separator.size()));
        return PromptParts{std::move(demo),
                           std::string(rendered.substr(text_begin, io - text_begin)),
                           std::move(input)};
      } catch (const MalformedMr&) {
      }
    }
  }
  throw MalformedMr(0, "prompt does not follow the demonstrator template");
}

}  // namespace danlg

#include "danlg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "danlg/random.hpp"
#include "danlg/text.hpp"

namespace danlg {
namespace {

const std::vector<std::string> kNames{
    "Crysis", "Portal 2", "Stardew Valley", "Hollow Knight", "Celeste", "Doom",
    "Minecraft", "Halo", "Tetris", "Skyrim", "Journey", "Limbo", "Hades", "Braid",
    "Fez", "Bastion", "Spelunky", "Undertale", "Inside", "Terraria"};
const std::vector<std::string> kGenres{"action-adventure, shooter", "puzzle", "platformer",
                                       "role-playing", "simulation", "strategy",
                                       "roguelike", "sandbox"};
const std::vector<std::string> kRatings{"poor", "average", "good", "excellent"};
const std::vector<std::string> kPlatforms{"PC", "Xbox, PlayStation", "Nintendo Switch",
                                          "PlayStation", "Xbox"};
const std::vector<std::string> kEsrb{"E (for Everyone)", "T (for Teen)", "M (for Mature)"};
const std::vector<std::string> kDevelopers{"Valve", "Bethesda", "Supergiant Games",
                                           "Team Cherry", "Mojang", "Bungie"};
const std::vector<std::string> kOptional{"genres",    "release_year", "rating",         "platforms",
                                         "esrb",      "developer",    "has_multiplayer"};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  SplitMix64 rng(a ^ (b * 0x9e3779b97f4a7c15ULL));
  return rng.next();
}

template <typename T>
const T& pick(const std::vector<T>& v, SplitMix64& rng) {
  return v[rng.below(v.size())];
}

std::string value_for(const std::string& attribute, SplitMix64& rng) {
  if (attribute == "name") return pick(kNames, rng);
  if (attribute == "genres") return pick(kGenres, rng);
  if (attribute == "release_year") return std::to_string(1990 + rng.below(31));
  if (attribute == "rating") return pick(kRatings, rng);
  if (attribute == "platforms") return pick(kPlatforms, rng);
  if (attribute == "esrb") return pick(kEsrb, rng);
  if (attribute == "developer") return pick(kDevelopers, rng);
  return rng.below(2) == 0 ? "yes" : "no";
}

MeaningRepresentation random_mr(SplitMix64& rng) {
  static const std::vector<std::string> das{"inform", "give_opinion", "suggest", "request",
                                            "confirm"};
  const std::string& da = pick(das, rng);
  std::vector<std::string> optional = kOptional;
  shuffle(optional, rng);
  std::vector<SlotValue> slots;
  if (da == "request") {
    const std::size_t n = 1 + rng.below(2);
    for (std::size_t i = 0; i < n; ++i) slots.push_back({optional[i], value_for(optional[i], rng)});
    slots.push_back({optional[n], "?"});
  } else if (da == "give_opinion") {
    slots.push_back({"name", value_for("name", rng)});
    slots.push_back({"rating", value_for("rating", rng)});
    std::erase(optional, "rating");
    const std::size_t n = rng.below(2);
    for (std::size_t i = 0; i < n; ++i) slots.push_back({optional[i], value_for(optional[i], rng)});
  } else {
    slots.push_back({"name", value_for("name", rng)});
    const std::size_t n = da == "inform" ? 2 + rng.below(4) : 1 + rng.below(2);
    for (std::size_t i = 0; i < n; ++i) slots.push_back({optional[i], value_for(optional[i], rng)});
  }
  return MeaningRepresentation({DaGroup{da, std::move(slots)}});
}

std::string slot_phrase(const SlotValue& slot, SplitMix64& rng) {
  const std::string& v = slot.value;
  const auto& a = slot.attribute;
  if (v == "?") {
    std::string readable = a;
    std::replace(readable.begin(), readable.end(), '_', ' ');
    return rng.below(2) == 0 ? "whatever " + readable + " you prefer"
                             : "any " + readable + " you like";
  }
  auto choose = [&](std::vector<std::string> options) { return pick(options, rng); };
  if (a == "genres") return choose({"a " + v + " game", "one of those " + v + " titles"});
  if (a == "release_year") return choose({"released in " + v, "from " + v, "that came out in " + v});
  if (a == "rating") return choose({"rated " + v + " by players", "with " + v + " reviews"});
  if (a == "platforms") return choose({"available on " + v, "playable on " + v});
  if (a == "esrb") return choose({"rated " + v, "carrying an ESRB rating of " + v});
  if (a == "developer") return choose({"made by " + v, "developed by " + v});
  if (a == "has_multiplayer") {
    return v == "yes" ? choose({"with multiplayer", "that supports online play"})
                      : choose({"single-player only", "without multiplayer"});
  }
  return v;
}

std::string join_phrases(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += i + 1 == parts.size() ? " and " : ", ";
    out += parts[i];
  }
  return out;
}

// `keep` decides per slot whether it is realized; references keep all.
std::string realize(const MeaningRepresentation& mr, SplitMix64& rng,
                    const std::vector<bool>* keep = nullptr) {
  const auto& group = mr.groups().front();
  if (group.slots.empty()) {
    static const std::vector<std::string> hello{"Hello!", "Hi there.", "Hey, good to see you.",
                                                "Hello, nice to meet you."};
    return pick(hello, rng);
  }
  std::string name;
  std::vector<std::string> phrases;
  for (std::size_t i = 0; i < group.slots.size(); ++i) {
    if (keep != nullptr && !(*keep)[i]) continue;
    const auto& slot = group.slots[i];
    if (slot.attribute == "name") {
      name = slot.value;
    } else {
      phrases.push_back(slot_phrase(slot, rng));
    }
  }
  const std::string subject = name.empty() ? "it" : name;
  const std::string rest = join_phrases(phrases);
  const std::string& da = group.da;
  std::vector<std::string> frames;
  if (da == "inform") {
    frames = {subject + " is a game " + rest + ".", subject + ": " + rest + ".",
              "Let me tell you about " + subject + ", " + rest + "."};
  } else if (da == "give_opinion") {
    frames = {"I think " + subject + " is a game " + rest + ".",
              "Honestly, " + subject + " is one " + rest + "."};
  } else if (da == "suggest") {
    frames = {"Have you tried " + subject + ", " + rest + "?",
              "You might enjoy " + subject + ", " + rest + "."};
  } else if (da == "request") {
    frames = {"Are you after a game " + rest + "?", "What about something " + rest + "?"};
  } else {
    frames = {"You mean " + subject + ", the one " + rest + ", right?",
              "So you are talking about " + subject + ", " + rest + "?"};
  }
  std::string sentence = pick(frames, rng);
  // Collapse artifacts of an empty phrase list ("a game ." -> "a game.").
  std::string cleaned;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (sentence[i] == ' ' && i + 1 < sentence.size() &&
        (sentence[i + 1] == '.' || sentence[i + 1] == '?' || sentence[i + 1] == ',')) {
      continue;
    }
    cleaned += sentence[i];
  }
  return cleaned;
}

double mode_bonus(PromptMode mode) {
  switch (mode) {
    case PromptMode::kBaseline: return 0.0;
    case PromptMode::kP1: return 0.03;
    case PromptMode::kP2: return 0.05;
    case PromptMode::kP3: return 0.07;
  }
  return 0.0;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (start < s.size()) {
    auto end = s.find(' ', start);
    if (end == std::string::npos) end = s.size();
    if (end > start) words.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return words;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Corpus synthetic_corpus(const SyntheticSpec& spec) {
  SplitMix64 rng(spec.seed);
  Corpus corpus;
  corpus.name = "synthetic";
  std::set<MeaningRepresentation> seen;
  std::vector<MeaningRepresentation> mrs;
  mrs.push_back(MeaningRepresentation({DaGroup{"greet", {}}}));
  seen.insert(mrs.back());
  while (mrs.size() < spec.num_mrs) {
    auto mr = random_mr(rng);
    if (seen.insert(mr).second) mrs.push_back(std::move(mr));
  }
  static const std::size_t kRefCounts[] = {3, 1, 2, 3, 4, 5, 3, 6, 8, 12, 3, 2};
  for (std::size_t i = 0; i < mrs.size(); ++i) {
    const std::size_t refs = i == 1 ? 25 : kRefCounts[i % std::size(kRefCounts)];
    for (std::size_t r = 0; r < refs; ++r) {
      corpus.samples.push_back({mrs[i], realize(mrs[i], rng), corpus.samples.size()});
    }
  }
  return corpus;
}

Corpus synthetic_single_da_corpus(std::size_t samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Corpus corpus;
  corpus.name = "synthetic-single-da";
  while (corpus.samples.size() < samples) {
    std::vector<std::string> optional = kOptional;
    shuffle(optional, rng);
    std::vector<SlotValue> slots{{"name", value_for("name", rng)}};
    const std::size_t n = 1 + rng.below(4);
    for (std::size_t i = 0; i < n; ++i) slots.push_back({optional[i], value_for(optional[i], rng)});
    MeaningRepresentation mr({DaGroup{"inform", std::move(slots)}});
    corpus.samples.push_back({mr, realize(mr, rng), corpus.samples.size()});
  }
  return corpus;
}

std::vector<GenerationRecord> synthetic_generations(const Corpus& corpus,
                                                    std::span<const PromptMode> modes,
                                                    const SyntheticSpec& spec) {
  static const std::vector<std::string> kFiller{"thing", "really", "stuff", "game", "nice"};
  std::vector<MeaningRepresentation> mrs;
  std::set<MeaningRepresentation> seen;
  for (const auto& s : corpus.samples) {
    if (seen.insert(s.mr).second) mrs.push_back(s.mr);
  }
  std::vector<GenerationRecord> records;
  for (PromptMode mode : modes) {
    for (int epoch = 0; epoch <= spec.epochs; ++epoch) {
      const double quality =
          epoch == 0 ? 0.15 + mode_bonus(mode)
                     : std::min(0.95, 0.45 + 0.09 * epoch + mode_bonus(mode));
      for (std::size_t m = 0; m < mrs.size(); ++m) {
        GenerationRecord rec;
        rec.sample_key = render_mr(mrs[m]);
        rec.representation = mode;
        rec.fold = static_cast<int>(m % 5);
        rec.epoch = epoch;
        for (std::size_t k = 0; k < spec.outputs_per_mr; ++k) {
          SplitMix64 rng(mix(mix(spec.seed, m), mix(static_cast<std::uint64_t>(mode) * 131 + epoch, k)));
          const auto& slots = mrs[m].groups().front().slots;
          std::vector<bool> keep(slots.size());
          for (std::size_t i = 0; i < slots.size(); ++i) keep[i] = rng.uniform() < quality;
          auto words = split_words(realize(mrs[m], rng, &keep));
          for (auto& w : words) {
            if (rng.uniform() > quality + 0.3) w = pick(kFiller, rng);
          }
          std::string out;
          for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
          rec.outputs.push_back(out.empty() ? "game" : out);
        }
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

std::vector<double> synthetic_embedding(std::string_view sentence, std::size_t dimension) {
  std::vector<double> v(dimension, 0.0);
  if (dimension == 0) return v;
  v[0] = 0.25;  // bias keeps the vector non-zero
  for (const auto& token : word_tokenize(sentence)) {
    SplitMix64 rng(fnv1a(token));
    for (std::size_t d = 0; d < dimension; ++d) v[d] += rng.uniform() - 0.5;
  }
  return v;
}

double synthetic_pair_score(std::string_view candidate, std::string_view reference) {
  std::map<std::string, int> c, r;
  for (auto& t : word_tokenize(candidate)) ++c[t];
  for (auto& t : word_tokenize(reference)) ++r[t];
  int overlap = 0, nc = 0, nr = 0;
  for (const auto& [t, n] : c) {
    nc += n;
    if (auto it = r.find(t); it != r.end()) overlap += std::min(n, it->second);
  }
  for (const auto& [t, n] : r) nr += n;
  if (nc == 0 || nr == 0) return 0.0;
  return 2.0 * overlap / static_cast<double>(nc + nr);
}

Corpus synthetic_dac_corpus(std::size_t samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Corpus corpus;
  corpus.name = "synthetic-dac";
  static const std::vector<std::string> das{"inform", "request", "confirm", "suggest",
                                            "give_opinion"};
  for (std::size_t i = 0; i < samples; ++i) {
    const std::string& da = das[i % das.size()];
    const std::string name = value_for("name", rng);
    const std::string genre = value_for("genres", rng);
    const std::string year = value_for("release_year", rng);
    const std::string rating = value_for("rating", rng);
    std::vector<SlotValue> slots;
    std::vector<std::string> templates;
    if (da == "inform") {
      slots = {{"name", name}, {"genres", genre}, {"release_year", year}};
      templates = {name + " is a " + genre + " game released in " + year + ".",
                   name + " came out in " + year + " and it is a " + genre + " title.",
                   "The " + genre + " game " + name + " was released in " + year + "."};
    } else if (da == "request") {
      slots = {{"genres", genre}, {"release_year", "?"}};
      templates = {"What year do you like your " + genre + " games from?",
                   "Which release year do you prefer for " + genre + " games?",
                   "Do you care when a " + genre + " game came out?"};
    } else if (da == "confirm") {
      slots = {{"name", name}, {"release_year", year}};
      templates = {"You mean " + name + " from " + year + ", right?",
                   "So you are talking about " + name + ", the " + year + " one, correct?",
                   "Just to check, " + name + " from " + year + "?"};
    } else if (da == "suggest") {
      slots = {{"name", name}, {"genres", genre}};
      templates = {"Have you tried " + name + "? You might like it if you enjoy " + genre + " games.",
                   "I suggest " + name + " if you are into " + genre + " games.",
                   "Maybe give " + name + " a try, it is a fun " + genre + " pick."};
    } else {
      slots = {{"name", name}, {"rating", rating}};
      templates = {"I think " + name + " is " + rating + ".",
                   "In my opinion " + name + " is a " + rating + " game.",
                   "Honestly I found " + name + " to be " + rating + "."};
    }
    MeaningRepresentation mr({DaGroup{da, std::move(slots)}});
    corpus.samples.push_back({std::move(mr), pick(templates, rng), i});
  }
  // Interleave labels unpredictably so splits are not label-periodic.
  shuffle(corpus.samples, rng);
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) corpus.samples[i].sample_id = i;
  return corpus;
}

}  // namespace danlg

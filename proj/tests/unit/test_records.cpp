// File formats exchanged with the generation and scoring adapters.

#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "danlg/error.hpp"
#include "danlg/records.hpp"
#include "danlg/synthetic.hpp"
#include "danlg/text.hpp"

namespace danlg {
namespace {

using nlohmann::json;

TEST(Generations, ParseCanonicalizesKeys) {
  const auto recs = parse_generations(
      "{\"sample_key\": \"inform(name[Crysis], rating[good])\", \"representation\": \"p2\", "
      "\"fold\": 3, \"epoch\": 0, \"outputs\": [\"a\", \"b\"]}\n");
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].sample_key, "inform ( name = Crysis ; rating = good )");
  EXPECT_EQ(recs[0].representation, PromptMode::kP2);
  EXPECT_EQ(recs[0].fold, 3);
  EXPECT_EQ(recs[0].outputs.size(), 2u);
}

TEST(Generations, WriteParseRoundTrip) {
  const auto corpus = synthetic_corpus({.num_mrs = 8});
  const std::vector<PromptMode> modes{PromptMode::kBaseline, PromptMode::kP1};
  const auto recs = synthetic_generations(corpus, modes, {.num_mrs = 8, .epochs = 1});
  std::ostringstream out;
  write_generations(recs, out);
  const auto back = parse_generations(out.str());
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].sample_key, recs[i].sample_key);
    EXPECT_EQ(back[i].representation, recs[i].representation);
    EXPECT_EQ(back[i].fold, recs[i].fold);
    EXPECT_EQ(back[i].epoch, recs[i].epoch);
    EXPECT_EQ(back[i].outputs, recs[i].outputs);
  }
  // Each row carries exactly the documented fields.
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  const auto row = json::parse(line);
  for (const char* key : {"sample_key", "representation", "fold", "epoch", "outputs"}) {
    EXPECT_TRUE(row.contains(key)) << key;
  }
  EXPECT_EQ(row.size(), 5u);
}

TEST(Generations, RowErrors) {
  auto row_of = [](const std::string& content) -> std::size_t {
    try {
      parse_generations(content);
    } catch (const FormatError& e) {
      return e.row();
    }
    return 999;
  };
  const std::string good =
      "{\"sample_key\": \"greet (  )\", \"representation\": \"baseline\", \"fold\": 0, "
      "\"epoch\": 1, \"outputs\": [\"hi\"]}\n";
  EXPECT_EQ(row_of(good + "{\"sample_key\": \"greet (  )\"}\n"), 1u);
  EXPECT_EQ(row_of(good + "{\"sample_key\": \"greet (\", \"representation\": \"baseline\", "
                          "\"fold\": 0, \"epoch\": 1, \"outputs\": []}\n"),
            1u);
  EXPECT_EQ(row_of("{\"sample_key\": \"greet (  )\", \"representation\": \"baseline\", "
                   "\"fold\": 5, \"epoch\": 1, \"outputs\": []}\n"),
            0u);
  EXPECT_EQ(row_of("{\"sample_key\": \"greet (  )\", \"representation\": \"p9\", "
                   "\"fold\": 0, \"epoch\": 1, \"outputs\": []}\n"),
            0u);
  EXPECT_EQ(row_of("[1, 2]\n"), 0u);
}

TEST(Embeddings, LookupByContentId) {
  const std::vector<std::pair<std::string, std::vector<double>>> rows{
      {sentence_id("Crysis is fun."), {0.5, -0.25}},
      {sentence_id("Halo is old."), {1.0, 2.0}}};
  std::ostringstream out;
  write_embeddings(rows, out);
  const auto table = EmbeddingTable::parse(out.str());
  EXPECT_EQ(table.size(), 2u);
  EXPECT_EQ(table.dimension(), 2u);
  EXPECT_EQ(table.lookup("  Crysis is   fun."), (std::vector<double>{0.5, -0.25}));
  try {
    table.lookup("unknown");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingEmbedding);
  }
}

TEST(Embeddings, RejectsRaggedAndDuplicateRows) {
  EXPECT_THROW(EmbeddingTable::parse("{\"id\": \"a\", \"vector\": [1, 2]}\n"
                                     "{\"id\": \"b\", \"vector\": [1]}\n"),
               Error);
  EXPECT_THROW(EmbeddingTable::parse("{\"id\": \"a\", \"vector\": [1]}\n"
                                     "{\"id\": \"a\", \"vector\": [2]}\n"),
               Error);
  EXPECT_THROW(EmbeddingTable::parse("{\"id\": \"a\"}\n"), FormatError);
}

TEST(PairScores, LookupAndErrors) {
  const std::vector<std::pair<std::string, double>> rows{{pair_id("a b", "c"), 0.75}};
  std::ostringstream out;
  write_pair_scores(rows, out);
  const auto table = PairScoreTable::parse(out.str());
  EXPECT_EQ(table.lookup("a  b", "c"), 0.75);
  try {
    table.lookup("c", "a b");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingPairScore);
  }
  EXPECT_THROW(PairScoreTable::parse("{\"id\": \"x\", \"score\": 1}\n{\"id\": \"x\", \"score\": 0}\n"),
               Error);
}

TEST(Predictions, RunSpecificRowsWin) {
  const auto table = PredictionTable::parse(
      "{\"sample_key\": \"greet (  )\", \"output_index\": 0, \"predicted\": [\"greet\"]}\n"
      "{\"sample_key\": \"greet (  )\", \"output_index\": 0, \"predicted\": [\"inform\"], "
      "\"representation\": \"p1\", \"epoch\": 2}\n");
  EXPECT_EQ(table.size(), 2u);
  const auto* generic = table.find("greet (  )", 0, PromptMode::kP3, 2);
  ASSERT_NE(generic, nullptr);
  EXPECT_EQ(*generic, std::vector<std::string>{"greet"});
  const auto* specific = table.find("greet (  )", 0, PromptMode::kP1, 2);
  ASSERT_NE(specific, nullptr);
  EXPECT_EQ(*specific, std::vector<std::string>{"inform"});
  EXPECT_EQ(table.find("greet (  )", 1, PromptMode::kP1, 2), nullptr);

  std::ostringstream out;
  write_predictions(table.rows(), out);
  EXPECT_EQ(PredictionTable::parse(out.str()).rows().size(), 2u);
}

}  // namespace
}  // namespace danlg

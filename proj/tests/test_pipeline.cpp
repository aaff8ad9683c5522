#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>

#include "raredis/pipeline.hpp"

using namespace raredis;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const char* tag) {
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path = (std::filesystem::temp_directory_path() /
            (std::string("raredis_pipe_") + tag + "_" + std::to_string(stamp) +
             ".jsonl"))
               .string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

Prediction make_pred(std::string doc_id, EntityType t, std::string extracted,
                     std::optional<Span> span = std::nullopt) {
  Prediction p;
  p.doc_id = std::move(doc_id);
  p.etype = t;
  p.extracted = std::move(extracted);
  p.span = span;
  return p;
}

std::vector<Document> fixture_corpus() {
  return {
      {"t1", "Binder syndrome is a rare congenital condition.",
       {{"T1", EntityType::RareDisease, {{0, 15}}, "Binder syndrome"},
        {"T2", EntityType::Sign, {{21, 25}}, "rare"}}},
      {"t2", "Patients report fever and a persistent rash.", {}},
      {"e1", "Cystic fibrosis is a rare disease affecting the lungs.", {}},
      {"e2", "This passage mentions no conditions at all.", {}},
  };
}

SplitAssignment fixture_split() {
  SplitAssignment split;
  split.seed = 7;
  split.train = {"t1", "t2"};
  split.test = {"e1", "e2"};
  return split;
}

}  // namespace

TEST_CASE("prediction JSONL round trip") {
  std::vector<Prediction> preds = {
      make_pred("e1", EntityType::RareDisease, "cystic fibrosis", Span{0, 15}),
      make_pred("e2", EntityType::Symptom, "made-up finding"),
  };
  std::vector<Prediction> back = predictions_from_jsonl(predictions_to_jsonl(preds));
  REQUIRE(back.size() == 2);
  CHECK(back[0].doc_id == "e1");
  CHECK(back[0].etype == EntityType::RareDisease);
  CHECK(back[0].extracted == "cystic fibrosis");
  REQUIRE(back[0].span.has_value());
  CHECK(*back[0].span == Span{0, 15});
  CHECK(back[1].etype == EntityType::Symptom);
  CHECK_FALSE(back[1].span.has_value());
}

TEST_CASE("schema errors carry the offending line number") {
  const std::string good =
      R"({"doc_id":"d","etype":"RareDisease","extracted":"x"})";
  auto message_of = [](const std::string& content) -> std::string {
    try {
      predictions_from_jsonl(content);
    } catch (const SchemaError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message_of(good + "\nnot json\n").find("line 2") != std::string::npos);
  CHECK(message_of(R"({"etype":"Sign","extracted":"x"})").find("doc_id") !=
        std::string::npos);
  CHECK(message_of(R"({"doc_id":"d","etype":"Alien","extracted":"x"})")
            .find("etype") != std::string::npos);
  CHECK(message_of(
            R"({"doc_id":"d","etype":"Sign","extracted":"x","start":3})")
            .find("paired") != std::string::npos);
  CHECK(message_of(
            R"({"doc_id":"d","etype":"Sign","extracted":"x","start":5,"end":5})")
            .find("span") != std::string::npos);
}

TEST_CASE("end-to-end run over a mock endpoint grounds what it can") {
  TempFile tmp("run");
  auto cache = std::make_shared<ResponseCache>(tmp.path);
  LlmClient client(cache, EndpointConfig{}, /*live_allowed=*/true);
  std::atomic<int> calls{0};
  client.set_transport([&](const LlmRequest&) {
    ++calls;
    return std::string("1. cystic fibrosis");
  });

  RunOptions options;
  options.setting = PromptSetting::Zero;
  options.format = PromptFormat::Simple;
  RunResult run = run_pipeline(fixture_corpus(), fixture_split(), options, client);

  // one request per (test doc, entity type)
  CHECK(calls.load() == 8);
  REQUIRE(run.predictions.size() == 8);
  // outputs ordered by test-doc order, then entity type
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(run.predictions[i].doc_id == "e1");
    CHECK(run.predictions[i].etype == kAllEntityTypes[i]);
    CHECK(run.predictions[i].grounded());  // surface occurs in e1
  }
  for (std::size_t i = 4; i < 8; ++i) {
    CHECK(run.predictions[i].doc_id == "e2");
    CHECK_FALSE(run.predictions[i].grounded());
  }
  CHECK(run.unstructured_responses == 0);
  CHECK_FALSE(run.config_fingerprint.empty());

  // a second pass is answered from the cache and yields identical output
  RunResult again = run_pipeline(fixture_corpus(), fixture_split(), options, client);
  CHECK(calls.load() == 8);
  CHECK(predictions_to_jsonl(again.predictions) ==
        predictions_to_jsonl(run.predictions));
}

TEST_CASE("max_docs limits the run to the first test documents") {
  TempFile tmp("maxdocs");
  auto cache = std::make_shared<ResponseCache>(tmp.path);
  LlmClient client(cache, EndpointConfig{}, /*live_allowed=*/true);
  std::atomic<int> calls{0};
  client.set_transport([&](const LlmRequest&) {
    ++calls;
    return std::string("None.");
  });
  RunOptions options;
  options.max_docs = 1;
  RunResult run = run_pipeline(fixture_corpus(), fixture_split(), options, client);
  CHECK(calls.load() == 4);
  CHECK(run.predictions.empty());  // every response was a refusal
}

TEST_CASE("prose responses are counted as unstructured") {
  TempFile tmp("prose");
  auto cache = std::make_shared<ResponseCache>(tmp.path);
  LlmClient client(cache, EndpointConfig{}, /*live_allowed=*/true);
  client.set_transport([](const LlmRequest&) {
    return std::string(
        "The passage describes a patient whose clinical picture is most "
        "consistent with a pulmonary condition of genetic origin");
  });
  RunOptions options;
  options.max_docs = 1;
  RunResult run = run_pipeline(fixture_corpus(), fixture_split(), options, client);
  CHECK(run.unstructured_responses == 4);
}

TEST_CASE("few-shot specs pull the example from the training split") {
  std::vector<Document> corpus = fixture_corpus();
  SplitAssignment split = fixture_split();
  RunOptions options;
  options.setting = PromptSetting::Few;
  options.strategy = SelectionStrategy::Random;
  options.seed = 11;
  const Document& test_doc = corpus[2];  // e1

  PromptSpec spec = build_prompt_spec(corpus, split, options, test_doc,
                                      EntityType::RareDisease, nullptr);
  REQUIRE(spec.example.has_value());
  CHECK((spec.example->text == corpus[0].text || spec.example->text == corpus[1].text));
  if (spec.example->text == corpus[0].text) {
    CHECK(spec.example->gold_surfaces ==
          std::vector<std::string>{"Binder syndrome"});  // Sign entity filtered out
  } else {
    CHECK(spec.example->gold_surfaces.empty());
  }
  // same seed, same pick
  PromptSpec repeat = build_prompt_spec(corpus, split, options, test_doc,
                                        EntityType::RareDisease, nullptr);
  CHECK(spec.example->text == repeat.example->text);
}

TEST_CASE("similarity strategy picks the closest training document") {
  std::vector<Document> corpus = fixture_corpus();
  corpus[3].text = corpus[1].text;  // e2 duplicates t2
  SplitAssignment split = fixture_split();
  RunOptions options;
  options.setting = PromptSetting::Few;
  options.strategy = SelectionStrategy::Similar;

  std::vector<Document> pool = {corpus[0], corpus[1], corpus[2], corpus[3]};
  VectorMap vectors = vectorize(pool);
  PromptSpec spec = build_prompt_spec(corpus, split, options, corpus[3],
                                      EntityType::Disease, &vectors);
  REQUIRE(spec.example.has_value());
  CHECK(spec.example->text == corpus[1].text);
}

TEST_CASE("run options fingerprint separates configurations") {
  RunOptions a;
  RunOptions b;
  CHECK(a.fingerprint() == b.fingerprint());
  b.setting = PromptSetting::Few;
  CHECK(a.fingerprint() != b.fingerprint());
  RunOptions c;
  c.definitions[EntityType::Sign] = "observable findings";
  CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("split referencing an unknown doc_id is rejected") {
  TempFile tmp("badsplit");
  auto cache = std::make_shared<ResponseCache>(tmp.path);
  LlmClient client(cache, EndpointConfig{}, /*live_allowed=*/true);
  client.set_transport([](const LlmRequest&) { return std::string("None."); });
  SplitAssignment split = fixture_split();
  split.test.push_back("ghost");
  RunOptions options;
  CHECK_THROWS_AS(run_pipeline(fixture_corpus(), split, options, client),
                  ConfigError);
}

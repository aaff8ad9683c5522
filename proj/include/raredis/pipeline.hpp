#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "raredis/corpus.hpp"
#include "raredis/llm_client.hpp"
#include "raredis/prompting.hpp"
#include "raredis/selection.hpp"
#include "raredis/types.hpp"

namespace raredis {

enum class SelectionStrategy { Random, Similar };

const char* to_string(SelectionStrategy s);
std::optional<SelectionStrategy> strategy_from_string(const std::string& s);

struct RunOptions {
  PromptSetting setting = PromptSetting::Zero;
  PromptFormat format = PromptFormat::Simple;
  SelectionStrategy strategy = SelectionStrategy::Random;
  std::string model_id = "gpt-3.5-turbo";
  double temperature = 0.0;
  std::uint64_t seed = 0;
  std::size_t max_docs = 0;       // 0 = all test documents
  std::size_t max_in_flight = 4;  // concurrent (doc, type) requests
  std::map<EntityType, std::string> definitions;  // empty -> defaults

  std::string fingerprint() const;
};

struct RunResult {
  std::vector<Prediction> predictions;
  std::size_t unstructured_responses = 0;
  std::string config_fingerprint;
};

// Full prompt->complete->parse->ground pass over the test split. Requests
// for distinct (document, entity type) pairs run concurrently up to
// max_in_flight; outputs are ordered by (test doc order, entity type).
RunResult run_pipeline(const std::vector<Document>& corpus,
                       const SplitAssignment& split, const RunOptions& options,
                       LlmClient& client);

// Builds the prompt for one (test doc, entity type), including few-shot
// example selection. Exposed for `render` and for tests.
PromptSpec build_prompt_spec(const std::vector<Document>& corpus,
                             const SplitAssignment& split,
                             const RunOptions& options,
                             const Document& test_doc, EntityType etype,
                             const VectorMap* vectors);

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Prediction files: JSON-lines, one record per prediction with doc_id,
// etype, extracted, optional start/end. External systems may supply spans
// directly, bypassing grounding.
std::string predictions_to_jsonl(const std::vector<Prediction>& preds);
std::vector<Prediction> predictions_from_jsonl(const std::string& content);
std::vector<Prediction> load_predictions_file(const std::string& path);

}  // namespace raredis

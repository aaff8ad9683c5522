#include "raredis/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "raredis/grounding.hpp"
#include "raredis/output_parse.hpp"
#include "raredis/text.hpp"

namespace raredis {

const char* to_string(SelectionStrategy s) {
  return s == SelectionStrategy::Random ? "random" : "similar";
}

std::optional<SelectionStrategy> strategy_from_string(const std::string& s) {
  std::string k = ascii_lower(s);
  if (k == "random") return SelectionStrategy::Random;
  if (k == "similar") return SelectionStrategy::Similar;
  return std::nullopt;
}

std::string RunOptions::fingerprint() const {
  std::ostringstream canon;
  canon << to_string(setting) << '\x1f' << to_string(format) << '\x1f'
        << to_string(strategy) << '\x1f' << model_id << '\x1f' << temperature
        << '\x1f' << seed << '\x1f' << max_docs;
  for (EntityType t : kAllEntityTypes) {
    auto it = definitions.find(t);
    canon << '\x1f' << (it == definitions.end() ? default_definition(t) : it->second);
  }
  return fnv1a64_hex(canon.str());
}

PromptSpec build_prompt_spec(const std::vector<Document>& corpus,
                             const SplitAssignment& split,
                             const RunOptions& options,
                             const Document& test_doc, EntityType etype,
                             const VectorMap* vectors) {
  std::map<std::string, const Document*> by_id;
  for (const Document& d : corpus) by_id[d.doc_id] = &d;

  PromptSpec spec;
  spec.setting = options.setting;
  spec.format = options.format;
  spec.etype = etype;
  auto dit = options.definitions.find(etype);
  spec.definition =
      dit == options.definitions.end() ? default_definition(etype) : dit->second;
  spec.input_text = test_doc.text;

  if (options.setting == PromptSetting::Few) {
    std::vector<Document> train;
    for (const std::string& id : split.train) {
      auto it = by_id.find(id);
      if (it != by_id.end()) train.push_back(*it->second);
    }
    if (train.empty()) throw EmptyTrainingSetError("split has no training documents");

    const Document* example = nullptr;
    if (options.strategy == SelectionStrategy::Similar && vectors) {
      example = &select_similar(train, test_doc, *vectors, options.seed);
    } else {
      example = &select_random(train, options.seed, test_doc.doc_id);
    }
    FewShotExample ex;
    ex.text = example->text;
    for (const GoldEntity& g : example->entities) {
      if (g.etype == etype) ex.gold_surfaces.push_back(g.surface);
    }
    spec.example = std::move(ex);
  }
  return spec;
}

RunResult run_pipeline(const std::vector<Document>& corpus,
                       const SplitAssignment& split, const RunOptions& options,
                       LlmClient& client) {
  std::map<std::string, const Document*> by_id;
  for (const Document& d : corpus) by_id[d.doc_id] = &d;

  std::vector<const Document*> test_docs;
  for (const std::string& id : split.test) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw ConfigError("split references unknown doc_id: " + id);
    test_docs.push_back(it->second);
    if (options.max_docs > 0 && test_docs.size() >= options.max_docs) break;
  }

  VectorMap vectors;
  if (options.setting == PromptSetting::Few &&
      options.strategy == SelectionStrategy::Similar) {
    // TF-IDF space over train + the evaluated test docs
    std::vector<Document> pool;
    for (const std::string& id : split.train) {
      auto it = by_id.find(id);
      if (it != by_id.end()) pool.push_back(*it->second);
    }
    for (const Document* d : test_docs) pool.push_back(*d);
    vectors = vectorize(pool);
  }

  struct Task {
    const Document* doc;
    EntityType etype;
  };
  std::vector<Task> tasks;
  for (const Document* d : test_docs) {
    for (EntityType t : kAllEntityTypes) tasks.push_back({d, t});
  }

  std::vector<std::vector<Prediction>> results(tasks.size());
  std::vector<bool> unstructured(tasks.size(), false);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      try {
        const Task& task = tasks[idx];
        PromptSpec spec = build_prompt_spec(corpus, split, options, *task.doc,
                                            task.etype, &vectors);
        LlmRequest req;
        req.model_id = options.model_id;
        req.temperature = options.temperature;
        req.prompt = render_prompt(spec);
        LlmResponse resp = client.complete(req);
        ParsedOutput parsed = parse_llm_output(resp.raw_text);
        unstructured[idx] = parsed.unstructured;
        results[idx] = ground(parsed.items, *task.doc, task.etype);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::size_t n_threads = std::max<std::size_t>(1, options.max_in_flight);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  RunResult run;
  run.config_fingerprint = options.fingerprint();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (unstructured[i]) ++run.unstructured_responses;
    for (Prediction& p : results[i]) run.predictions.push_back(std::move(p));
  }
  return run;
}

std::string predictions_to_jsonl(const std::vector<Prediction>& preds) {
  std::ostringstream out;
  for (const Prediction& p : preds) {
    nlohmann::ordered_json j;
    j["doc_id"] = p.doc_id;
    j["etype"] = to_string(p.etype);
    j["extracted"] = p.extracted;
    if (p.span) {
      j["start"] = p.span->start;
      j["end"] = p.span->end;
    }
    out << j.dump() << '\n';
  }
  return out.str();
}

std::vector<Prediction> predictions_from_jsonl(const std::string& content) {
  std::vector<Prediction> preds;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    auto fail = [&](const std::string& msg) {
      throw SchemaError("line " + std::to_string(lineno) + ": " + msg);
    };
    if (j.is_discarded()) fail("invalid JSON");
    if (!j.contains("doc_id") || !j["doc_id"].is_string()) fail("missing doc_id");
    if (!j.contains("etype") || !j["etype"].is_string()) fail("missing etype");
    if (!j.contains("extracted") || !j["extracted"].is_string()) {
      fail("missing extracted");
    }
    Prediction p;
    p.doc_id = j["doc_id"].get<std::string>();
    auto etype = entity_type_from_string(j["etype"].get<std::string>());
    if (!etype) fail("unknown etype: " + j["etype"].get<std::string>());
    p.etype = *etype;
    p.extracted = j["extracted"].get<std::string>();
    if (j.contains("start") != j.contains("end")) fail("start/end must be paired");
    if (j.contains("start")) {
      if (!j["start"].is_number_unsigned() || !j["end"].is_number_unsigned()) {
        fail("start/end must be non-negative integers");
      }
      Span s{j["start"].get<std::size_t>(), j["end"].get<std::size_t>()};
      if (s.start >= s.end) fail("empty or inverted span");
      p.span = s;
    }
    preds.push_back(std::move(p));
  }
  return preds;
}

std::vector<Prediction> load_predictions_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open predictions file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return predictions_from_jsonl(buf.str());
}

}  // namespace raredis

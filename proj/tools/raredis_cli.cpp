#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "raredis/corpus.hpp"
#include "raredis/error_analysis.hpp"
#include "raredis/evaluation.hpp"
#include "raredis/grounding.hpp"
#include "raredis/llm_client.hpp"
#include "raredis/output_parse.hpp"
#include "raredis/pipeline.hpp"
#include "raredis/prompting.hpp"
#include "raredis/text.hpp"

namespace fs = std::filesystem;
using namespace raredis;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

struct CliConfig {
  std::string corpus_dir;
  std::uint64_t seed = 0;
  std::string setting = "zero";
  std::string format = "simple";
  std::string strategy = "random";
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  std::string cache_path = "cache.jsonl";
  std::string mode = "replay";  // live | replay
  std::string match_level = "span";
  std::string stopwords_file;
  std::string embeddings_file;
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::map<std::string, std::string> label_map;  // raw label -> entity type
  std::size_t max_docs = 0;
  std::size_t max_in_flight = 4;
};

// JSON config file supplies defaults; explicit CLI flags override.
void load_config_file(const std::string& path, CliConfig& cfg) {
  nlohmann::json j = nlohmann::json::parse(read_file(path));
  auto get = [&](const char* key, auto& target) {
    if (j.contains(key)) target = j[key].get<std::decay_t<decltype(target)>>();
  };
  get("corpus", cfg.corpus_dir);
  get("seed", cfg.seed);
  get("setting", cfg.setting);
  get("format", cfg.format);
  get("strategy", cfg.strategy);
  get("model", cfg.model);
  get("temperature", cfg.temperature);
  get("cache", cfg.cache_path);
  get("mode", cfg.mode);
  get("match_level", cfg.match_level);
  get("stopwords", cfg.stopwords_file);
  get("embeddings", cfg.embeddings_file);
  get("endpoint", cfg.endpoint_url);
  get("max_docs", cfg.max_docs);
  get("max_in_flight", cfg.max_in_flight);
  if (j.contains("label_map")) {
    cfg.label_map = j["label_map"].get<std::map<std::string, std::string>>();
  }
}

LabelMap resolve_label_map(const CliConfig& cfg) {
  if (cfg.label_map.empty()) return default_label_map();
  LabelMap out;
  for (const auto& [raw, name] : cfg.label_map) {
    auto t = entity_type_from_string(name);
    if (!t) throw ConfigError("label_map: unknown entity type: " + name);
    out[ascii_lower(raw)] = *t;
  }
  return out;
}

StopWords resolve_stopwords(const CliConfig& cfg) {
  if (cfg.stopwords_file.empty()) return StopWords();
  return StopWords::from_file(cfg.stopwords_file);
}

RunOptions resolve_run_options(const CliConfig& cfg) {
  RunOptions opt;
  auto setting = prompt_setting_from_string(cfg.setting);
  auto format = prompt_format_from_string(cfg.format);
  auto strategy = strategy_from_string(cfg.strategy);
  if (!setting) throw ConfigError("unknown setting: " + cfg.setting);
  if (!format) throw ConfigError("unknown format: " + cfg.format);
  if (!strategy) throw ConfigError("unknown strategy: " + cfg.strategy);
  opt.setting = *setting;
  opt.format = *format;
  opt.strategy = *strategy;
  if (opt.setting == PromptSetting::Zero && cfg.strategy != "random") {
    std::cerr << "warning: selection strategy is ignored in the zero-shot setting\n";
  }
  opt.model_id = cfg.model;
  opt.temperature = cfg.temperature;
  opt.seed = cfg.seed;
  opt.max_docs = cfg.max_docs;
  opt.max_in_flight = cfg.max_in_flight;
  return opt;
}

SplitAssignment resolve_split(const CliConfig& cfg,
                              const std::vector<Document>& corpus,
                              const std::string& split_file) {
  if (!split_file.empty()) return split_from_json(read_file(split_file));
  return split_corpus(corpus, cfg.seed);
}

DocIndex subset_index(const std::vector<Document>& corpus,
                      const SplitAssignment* split, const std::string& subset) {
  DocIndex all = index_documents(corpus);
  if (!split) return all;
  const std::vector<std::string>* ids = nullptr;
  if (subset == "train") ids = &split->train;
  else if (subset == "validation") ids = &split->validation;
  else if (subset == "test") ids = &split->test;
  else throw ConfigError("unknown subset: " + subset);
  DocIndex out;
  for (const std::string& id : *ids) {
    auto it = all.find(id);
    if (it == all.end()) throw ConfigError("split references unknown doc_id: " + id);
    out[id] = it->second;
  }
  return out;
}

std::string scoring_fingerprint(const std::string& predictions_content,
                                const CliConfig& cfg) {
  std::ostringstream canon;
  canon << predictions_content << '\x1f' << cfg.match_level << '\x1f'
        << cfg.stopwords_file << '\x1f' << cfg.corpus_dir;
  return fnv1a64_hex(canon.str());
}

std::string single_regime_markdown(const RegimeScores& s, const std::string& title) {
  MatchReport both;
  both.exact = s;
  both.relaxed = s;
  std::ostringstream out;
  out << "### " << title << "\n\n";
  out << "| Entity | P | R | F1 | TP | FP | FN |\n|---|---|---|---|---|---|---|\n";
  auto row = [&](const std::string& name, const Counts& c) {
    Metrics m = metrics_from(c);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f | %.3f | %.3f", m.precision, m.recall, m.f1);
    out << "| " << name << " | " << buf << " | " << c.tp << " | " << c.fp << " | "
        << c.fn << " |\n";
  };
  for (EntityType t : kAllEntityTypes) {
    row(to_string(t), s.per_type[static_cast<std::size_t>(t)]);
  }
  row("Overall", s.overall);
  return out.str();
}

int cmd_stats(const CliConfig& cfg, const std::string& out_json,
              const std::string& hist_csv) {
  BratSkipReport skipped;
  std::vector<Document> corpus =
      load_corpus_dir(cfg.corpus_dir, resolve_label_map(cfg), &skipped);
  CorpusStats stats = corpus_stats(corpus);
  std::string json = stats_to_json(stats);
  if (out_json.empty()) {
    std::cout << json;
  } else {
    write_file(out_json, json);
  }
  if (!hist_csv.empty()) {
    std::ostringstream csv;
    csv << "doc_id,n_sentences,rare_disease,disease,sign,symptom\n";
    for (const PerDocCounts& pd : stats.per_doc) {
      csv << pd.doc_id << ',' << pd.n_sentences;
      for (EntityType t : kAllEntityTypes) {
        csv << ',' << pd.per_type[static_cast<std::size_t>(t)];
      }
      csv << '\n';
    }
    write_file(hist_csv, csv.str());
  }
  if (skipped.non_entity_lines || skipped.unmapped_labels) {
    std::cerr << "skipped " << skipped.non_entity_lines
              << " non-entity lines, " << skipped.unmapped_labels
              << " entities with unmapped labels\n";
  }
  return 0;
}

int cmd_split(const CliConfig& cfg, const std::string& out_file) {
  std::vector<Document> corpus = load_corpus_dir(cfg.corpus_dir, resolve_label_map(cfg));
  SplitAssignment split = split_corpus(corpus, cfg.seed);
  std::string json = split_to_json(split);
  if (out_file.empty()) {
    std::cout << json;
  } else {
    write_file(out_file, json);
  }
  return 0;
}

int cmd_render(const CliConfig& cfg, const std::string& etype_name,
               const std::string& input_file, const std::string& input_text,
               const std::string& example_file, const std::string& example_labels) {
  auto etype = entity_type_from_string(etype_name);
  if (!etype) throw ConfigError("unknown entity type: " + etype_name);
  RunOptions opt = resolve_run_options(cfg);

  PromptSpec spec;
  spec.setting = opt.setting;
  spec.format = opt.format;
  spec.etype = *etype;
  spec.definition = default_definition(*etype);
  spec.input_text =
      input_file.empty() ? input_text : normalize_ws(read_file(input_file));
  if (opt.setting == PromptSetting::Few) {
    FewShotExample ex;
    if (example_file.empty()) throw ConfigError("few-shot render needs --example-file");
    ex.text = normalize_ws(read_file(example_file));
    std::istringstream labels(example_labels);
    std::string label;
    while (std::getline(labels, label, ',')) {
      std::string t = normalize_ws(label);
      if (!t.empty()) ex.gold_surfaces.push_back(t);
    }
    spec.example = std::move(ex);
  }
  RenderedPrompt rendered = render_prompt(spec);
  std::cout << rendered.text << '\n';
  std::cerr << "fingerprint=" << rendered.spec_fingerprint
            << " token_estimate=" << rendered.token_estimate << '\n';
  return 0;
}

int cmd_run(const CliConfig& cfg, const std::string& split_file,
            const std::string& out_dir) {
  std::vector<Document> corpus = load_corpus_dir(cfg.corpus_dir, resolve_label_map(cfg));
  SplitAssignment split = resolve_split(cfg, corpus, split_file);
  RunOptions opt = resolve_run_options(cfg);

  bool live = cfg.mode == "live";
  if (!live && cfg.mode != "replay") throw ConfigError("mode must be live or replay");

  EndpointConfig endpoint;
  endpoint.url = cfg.endpoint_url;
  const char* key = std::getenv("PNB_API_KEY");
  endpoint.api_key = key ? key : "";
  auto cache = std::make_shared<ResponseCache>(cfg.cache_path);
  LlmClient client(cache, endpoint, live);

  RunResult result = run_pipeline(corpus, split, opt, client);

  write_file((fs::path(out_dir) / "predictions.jsonl").string(),
             predictions_to_jsonl(result.predictions));
  nlohmann::ordered_json manifest;
  manifest["config_fingerprint"] = result.config_fingerprint;
  manifest["cache_hash"] = cache->content_hash();
  manifest["model"] = cfg.model;
  manifest["setting"] = cfg.setting;
  manifest["format"] = cfg.format;
  manifest["strategy"] = cfg.strategy;
  manifest["seed"] = cfg.seed;
  manifest["mode"] = cfg.mode;
  manifest["n_test_docs"] =
      opt.max_docs > 0 ? std::min<std::size_t>(opt.max_docs, split.test.size())
                       : split.test.size();
  manifest["n_predictions"] = result.predictions.size();
  manifest["unstructured_responses"] = result.unstructured_responses;
  write_file((fs::path(out_dir) / "manifest.json").string(),
             manifest.dump(2) + "\n");
  std::cerr << "wrote " << result.predictions.size() << " predictions to "
            << out_dir << '\n';
  return 0;
}

int cmd_score(const CliConfig& cfg, const std::string& predictions_file,
              const std::string& split_file, const std::string& subset,
              const std::string& out_dir) {
  std::vector<Document> corpus = load_corpus_dir(cfg.corpus_dir, resolve_label_map(cfg));
  std::string content = read_file(predictions_file);
  std::vector<Prediction> preds = predictions_from_jsonl(content);
  StopWords stopwords = resolve_stopwords(cfg);

  std::optional<SplitAssignment> split;
  if (!split_file.empty()) split = split_from_json(read_file(split_file));
  DocIndex docs = subset_index(corpus, split ? &*split : nullptr, subset);

  // ground any span-less predictions so span-mode scoring is possible
  std::map<std::string, std::vector<std::string>> ungrounded;
  std::vector<Prediction> final_preds;
  if (cfg.match_level == "span") {
    std::map<std::pair<std::string, EntityType>, std::vector<std::string>> need;
    for (const Prediction& p : preds) {
      if (p.grounded()) {
        final_preds.push_back(p);
      } else {
        need[{p.doc_id, p.etype}].push_back(p.extracted);
      }
    }
    for (const auto& [key, strings] : need) {
      auto it = docs.find(key.first);
      if (it == docs.end()) {
        throw DocMismatchError("prediction references unknown doc_id: " + key.first);
      }
      for (Prediction& p : ground(strings, *it->second, key.second)) {
        final_preds.push_back(std::move(p));
      }
    }
  } else if (cfg.match_level == "string") {
    final_preds = preds;
  } else {
    throw ConfigError("match_level must be span or string");
  }

  std::string fingerprint = scoring_fingerprint(content, cfg);
  std::ostringstream md;
  md << "# Scoring report\n\nconfig_fingerprint: " << fingerprint
     << "\nmatch_level: " << cfg.match_level << "\n\n";
  std::string json;
  if (cfg.match_level == "span") {
    MatchReport report = score_all(final_preds, docs, stopwords);
    nlohmann::ordered_json j = nlohmann::json::parse(report_to_json(report));
    j["config_fingerprint"] = fingerprint;
    json = j.dump(2) + "\n";
    md << report_to_markdown(report);
  } else {
    RegimeScores scores = score_string_mode(final_preds, docs, stopwords);
    md << single_regime_markdown(scores, "String-mode (normalized surface) scores");
    nlohmann::ordered_json j;
    for (EntityType t : kAllEntityTypes) {
      Counts c = scores.per_type[static_cast<std::size_t>(t)];
      Metrics m = metrics_from(c);
      j[to_string(t)] = {{"tp", c.tp},        {"fp", c.fp},
                         {"fn", c.fn},        {"precision", m.precision},
                         {"recall", m.recall}, {"f1", m.f1}};
    }
    Metrics m = metrics_from(scores.overall);
    j["Overall"] = {{"tp", scores.overall.tp},
                    {"fp", scores.overall.fp},
                    {"fn", scores.overall.fn},
                    {"precision", m.precision},
                    {"recall", m.recall},
                    {"f1", m.f1}};
    j["config_fingerprint"] = fingerprint;
    json = j.dump(2) + "\n";
  }
  if (out_dir.empty()) {
    std::cout << json;
  } else {
    write_file((fs::path(out_dir) / "score.json").string(), json);
    write_file((fs::path(out_dir) / "score.md").string(), md.str());
  }
  return 0;
}

int cmd_errors(const CliConfig& cfg, const std::string& predictions_file,
               const std::string& split_file, const std::string& subset,
               const std::string& out_dir) {
  std::vector<Document> corpus = load_corpus_dir(cfg.corpus_dir, resolve_label_map(cfg));
  std::string content = read_file(predictions_file);
  std::vector<Prediction> preds = predictions_from_jsonl(content);
  StopWords stopwords = resolve_stopwords(cfg);

  std::optional<SplitAssignment> split;
  if (!split_file.empty()) split = split_from_json(read_file(split_file));
  DocIndex docs = subset_index(corpus, split ? &*split : nullptr, subset);

  // error analysis pools predictions across all entity-type prompts
  std::map<std::pair<std::string, EntityType>, std::vector<std::string>> need;
  std::vector<Prediction> final_preds;
  for (const Prediction& p : preds) {
    if (p.grounded()) {
      final_preds.push_back(p);
    } else {
      need[{p.doc_id, p.etype}].push_back(p.extracted);
    }
  }
  for (const auto& [key, strings] : need) {
    auto it = docs.find(key.first);
    if (it == docs.end()) {
      throw DocMismatchError("prediction references unknown doc_id: " + key.first);
    }
    for (Prediction& p : ground(strings, *it->second, key.second)) {
      final_preds.push_back(std::move(p));
    }
  }

  std::vector<ErrorRecord> records = classify_errors(final_preds, docs, stopwords);
  ErrorTable table = error_table(records);
  std::string fingerprint = scoring_fingerprint(content, cfg);
  std::string md = "# Error analysis\n\nconfig_fingerprint: " + fingerprint +
                   "\n\n" + error_table_to_markdown(table);
  if (out_dir.empty()) {
    std::cout << md;
  } else {
    write_file((fs::path(out_dir) / "errors.md").string(), md);
    write_file((fs::path(out_dir) / "errors.csv").string(), error_table_to_csv(table));
    write_file((fs::path(out_dir) / "error_records.jsonl").string(),
               error_records_to_jsonl(records));
  }
  return 0;
}

int cmd_report(const CliConfig& cfg, const std::string& predictions_file,
               const std::string& split_file, const std::string& subset,
               const std::string& out_file) {
  std::vector<Document> corpus = load_corpus_dir(cfg.corpus_dir, resolve_label_map(cfg));
  std::string content = read_file(predictions_file);
  std::vector<Prediction> preds = predictions_from_jsonl(content);
  StopWords stopwords = resolve_stopwords(cfg);

  std::optional<SplitAssignment> split;
  if (!split_file.empty()) split = split_from_json(read_file(split_file));
  DocIndex docs = subset_index(corpus, split ? &*split : nullptr, subset);

  std::map<std::pair<std::string, EntityType>, std::vector<std::string>> need;
  std::vector<Prediction> final_preds;
  for (const Prediction& p : preds) {
    if (p.grounded()) {
      final_preds.push_back(p);
    } else {
      need[{p.doc_id, p.etype}].push_back(p.extracted);
    }
  }
  for (const auto& [key, strings] : need) {
    auto it = docs.find(key.first);
    if (it == docs.end()) {
      throw DocMismatchError("prediction references unknown doc_id: " + key.first);
    }
    for (Prediction& p : ground(strings, *it->second, key.second)) {
      final_preds.push_back(std::move(p));
    }
  }

  MatchReport report = score_all(final_preds, docs, stopwords);
  std::vector<ErrorRecord> records = classify_errors(final_preds, docs, stopwords);
  ErrorTable table = error_table(records);

  std::ostringstream md;
  md << "# Benchmark report\n\nconfig_fingerprint: "
     << scoring_fingerprint(content, cfg) << "\n\n## Scores\n\n"
     << report_to_markdown(report) << "\n## Error analysis (exact match)\n\n"
     << error_table_to_markdown(table);
  if (out_file.empty()) {
    std::cout << md.str();
  } else {
    write_file(out_file, md.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rare-disease NER prompting benchmark"};
  app.require_subcommand(1);

  CliConfig cfg;
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file")
      ->each([&](const std::string& path) { load_config_file(path, cfg); });

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--corpus", cfg.corpus_dir, "corpus directory of .txt/.ann pairs");
    sub->add_option("--seed", cfg.seed, "split / selection seed");
    sub->add_option("--stopwords", cfg.stopwords_file, "stop-word list file");
  };

  auto* stats = app.add_subcommand("stats", "corpus statistics");
  std::string stats_out, hist_csv;
  add_common(stats);
  stats->add_option("--out", stats_out, "stats JSON output file");
  stats->add_option("--hist-csv", hist_csv, "per-document histogram CSV");

  auto* split = app.add_subcommand("split", "deterministic 8:1:1 split");
  std::string split_out;
  add_common(split);
  split->add_option("--out", split_out, "split JSON output file");

  auto* render = app.add_subcommand("render", "render one prompt variant");
  std::string etype_name = "raredisease", input_file, input_text, example_file,
              example_labels;
  add_common(render);
  render->add_option("--setting", cfg.setting, "zero | few");
  render->add_option("--format", cfg.format, "simple | structured");
  render->add_option("--etype", etype_name, "entity type");
  render->add_option("--input-file", input_file, "test passage file");
  render->add_option("--input-text", input_text, "test passage literal");
  render->add_option("--example-file", example_file, "few-shot example passage file");
  render->add_option("--example-labels", example_labels,
                     "comma-separated gold labels for the example");

  auto* run = app.add_subcommand("run", "prompt, complete, parse, ground");
  std::string run_split_file, run_out = "run_out";
  add_common(run);
  run->add_option("--setting", cfg.setting, "zero | few");
  run->add_option("--format", cfg.format, "simple | structured");
  run->add_option("--strategy", cfg.strategy, "random | similar");
  run->add_option("--model", cfg.model, "model id");
  run->add_option("--temperature", cfg.temperature, "sampling temperature");
  run->add_option("--cache", cfg.cache_path, "response cache (JSON lines)");
  run->add_option("--endpoint", cfg.endpoint_url, "chat-completions URL");
  run->add_option("--split-file", run_split_file, "precomputed split JSON");
  run->add_option("--max-docs", cfg.max_docs, "limit number of test documents");
  run->add_option("--max-in-flight", cfg.max_in_flight, "concurrent requests");
  run->add_option("--out", run_out, "output directory");
  bool live_flag = false, replay_flag = false;
  run->add_flag("--live", live_flag, "allow live endpoint calls");
  run->add_flag("--replay", replay_flag, "replay from cache only");

  auto* score = app.add_subcommand("score", "score a predictions file");
  std::string score_preds, score_split, score_subset = "test", score_out;
  add_common(score);
  score->add_option("--predictions", score_preds, "predictions JSONL")->required();
  score->add_option("--split-file", score_split, "restrict gold docs to a split subset");
  score->add_option("--subset", score_subset, "train | validation | test");
  score->add_option("--match-level", cfg.match_level, "span | string");
  score->add_option("--out", score_out, "output directory");

  auto* errors = app.add_subcommand("errors", "five-way error analysis");
  std::string err_preds, err_split, err_subset = "test", err_out;
  add_common(errors);
  errors->add_option("--predictions", err_preds, "predictions JSONL")->required();
  errors->add_option("--split-file", err_split, "restrict gold docs to a split subset");
  errors->add_option("--subset", err_subset, "train | validation | test");
  errors->add_option("--out", err_out, "output directory");

  auto* report = app.add_subcommand("report", "combined score + error report");
  std::string rep_preds, rep_split, rep_subset = "test", rep_out;
  add_common(report);
  report->add_option("--predictions", rep_preds, "predictions JSONL")->required();
  report->add_option("--split-file", rep_split, "restrict gold docs to a split subset");
  report->add_option("--subset", rep_subset, "train | validation | test");
  report->add_option("--out", rep_out, "output markdown file");

  try {
    app.parse(argc, argv);
    if (*run) {
      if (live_flag && replay_flag) throw ConfigError("--live and --replay conflict");
      if (live_flag) cfg.mode = "live";
      if (replay_flag) cfg.mode = "replay";
    }
    if (*stats) return cmd_stats(cfg, stats_out, hist_csv);
    if (*split) return cmd_split(cfg, split_out);
    if (*render) {
      return cmd_render(cfg, etype_name, input_file, input_text, example_file,
                        example_labels);
    }
    if (*run) return cmd_run(cfg, run_split_file, run_out);
    if (*score) return cmd_score(cfg, score_preds, score_split, score_subset, score_out);
    if (*errors) return cmd_errors(cfg, err_preds, err_split, err_subset, err_out);
    if (*report) return cmd_report(cfg, rep_preds, rep_split, rep_subset, rep_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

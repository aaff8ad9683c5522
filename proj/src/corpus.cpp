#include "raredis/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "raredis/text.hpp"

namespace fs = std::filesystem;

namespace raredis {

LabelMap default_label_map() {
  return {
      {"raredisease", EntityType::RareDisease},
      {"disease", EntityType::Disease},
      {"sign", EntityType::Sign},
      {"symptom", EntityType::Symptom},
  };
}

namespace {

std::string slice_surface(const std::u32string& text,
                          const std::vector<Span>& fragments) {
  std::u32string out;
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    if (i > 0) out.push_back(U' ');
    out.append(text.begin() + static_cast<std::ptrdiff_t>(fragments[i].start),
               text.begin() + static_cast<std::ptrdiff_t>(fragments[i].end));
  }
  return utf8_encode(out);
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

}  // namespace

BratParseResult parse_brat_document(const std::string& doc_id,
                                    const std::string& text_content,
                                    const std::string& ann_content,
                                    const LabelMap& label_map) {
  BratParseResult result;
  result.doc.doc_id = doc_id;
  result.doc.text = text_content;
  const std::u32string text32 = utf8_decode(text_content);

  LabelMap lower_map;
  for (const auto& [k, v] : label_map) lower_map[ascii_lower(k)] = v;

  for (const std::string& line : split_lines(ann_content)) {
    if (line.empty()) continue;
    if (line[0] != 'T') {
      ++result.skipped.non_entity_lines;
      continue;
    }
    auto tab1 = line.find('\t');
    if (tab1 == std::string::npos) {
      throw MalformedLineError(doc_id + ": missing tab in line: " + line);
    }
    auto tab2 = line.find('\t', tab1 + 1);
    std::string id = line.substr(0, tab1);
    std::string middle = line.substr(
        tab1 + 1, tab2 == std::string::npos ? std::string::npos : tab2 - tab1 - 1);
    std::string given_surface =
        tab2 == std::string::npos ? std::string() : line.substr(tab2 + 1);

    auto sp = middle.find(' ');
    if (sp == std::string::npos) {
      throw MalformedLineError(doc_id + ": no offsets in line: " + line);
    }
    std::string label = middle.substr(0, sp);
    auto it = lower_map.find(ascii_lower(label));
    if (it == lower_map.end()) {
      ++result.skipped.unmapped_labels;
      continue;
    }

    GoldEntity entity;
    entity.id = id;
    entity.etype = it->second;
    std::string offsets = middle.substr(sp + 1);
    std::istringstream off_in(offsets);
    std::string frag;
    while (std::getline(off_in, frag, ';')) {
      std::istringstream f(frag);
      long long start = -1, end = -1;
      if (!(f >> start >> end) || start < 0 || end <= start) {
        throw MalformedLineError(doc_id + ": bad offsets in line: " + line);
      }
      entity.fragments.push_back(
          {static_cast<std::size_t>(start), static_cast<std::size_t>(end)});
    }
    if (entity.fragments.empty()) {
      throw MalformedLineError(doc_id + ": no offsets in line: " + line);
    }
    std::sort(entity.fragments.begin(), entity.fragments.end(),
              [](const Span& a, const Span& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < entity.fragments.size(); ++i) {
      if (entity.fragments[i].start < entity.fragments[i - 1].end) {
        throw MalformedLineError(doc_id + ": overlapping fragments: " + line);
      }
    }
    if (entity.fragments.back().end > text32.size()) {
      throw SpanOutOfBoundsError(doc_id + ": span past end of text: " + line);
    }
    entity.surface = slice_surface(text32, entity.fragments);
    if (!given_surface.empty() &&
        normalize_ws(given_surface) != normalize_ws(entity.surface)) {
      throw SurfaceMismatchError(doc_id + ": surface \"" + given_surface +
                                 "\" does not match text slice \"" +
                                 entity.surface + "\"");
    }
    result.doc.entities.push_back(std::move(entity));
  }
  return result;
}

std::string serialize_brat_entities(const Document& doc) {
  static const std::map<EntityType, std::string> labels = {
      {EntityType::RareDisease, "RAREDISEASE"},
      {EntityType::Disease, "DISEASE"},
      {EntityType::Sign, "SIGN"},
      {EntityType::Symptom, "SYMPTOM"},
  };
  std::ostringstream out;
  for (const GoldEntity& e : doc.entities) {
    out << e.id << '\t' << labels.at(e.etype) << ' ';
    for (std::size_t i = 0; i < e.fragments.size(); ++i) {
      if (i > 0) out << ';';
      out << e.fragments[i].start << ' ' << e.fragments[i].end;
    }
    out << '\t' << normalize_ws(e.surface) << '\n';
  }
  return out.str();
}

CorpusStats corpus_stats(const std::vector<Document>& corpus) {
  CorpusStats stats;
  stats.n_docs = corpus.size();
  for (const Document& doc : corpus) {
    PerDocCounts pd;
    pd.doc_id = doc.doc_id;
    pd.n_sentences = count_sentences(doc.text);
    for (const GoldEntity& e : doc.entities) {
      ++pd.per_type[static_cast<std::size_t>(e.etype)];
    }
    stats.n_sentences += pd.n_sentences;
    for (std::size_t i = 0; i < 4; ++i) stats.per_type[i] += pd.per_type[i];
    stats.per_doc.push_back(std::move(pd));
  }
  return stats;
}

SplitAssignment split_corpus(const std::vector<Document>& corpus,
                             std::uint64_t seed) {
  if (corpus.empty()) throw EmptyCorpusError("cannot split an empty corpus");
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const Document& d : corpus) ids.push_back(d.doc_id);

  // Explicit Fisher-Yates so the assignment is stable across standard
  // library implementations.
  std::mt19937_64 rng(seed);
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(ids[i], ids[j]);
  }

  const std::size_t n = ids.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;

  SplitAssignment split;
  split.seed = seed;
  split.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.validation.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train),
                          ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val),
                    ids.end());
  return split;
}

std::vector<Document> load_corpus_dir(const std::string& dir,
                                      const LabelMap& label_map,
                                      BratSkipReport* skipped) {
  if (!fs::is_directory(dir)) {
    throw ConfigError("corpus directory not found: " + dir);
  }
  std::vector<fs::path> txt_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".txt") txt_files.push_back(entry.path());
  }
  std::sort(txt_files.begin(), txt_files.end());

  std::vector<Document> corpus;
  for (const fs::path& txt : txt_files) {
    fs::path ann = txt;
    ann.replace_extension(".ann");
    std::ifstream tin(txt, std::ios::binary);
    std::ostringstream tbuf;
    tbuf << tin.rdbuf();
    std::string ann_content;
    if (fs::exists(ann)) {
      std::ifstream ain(ann, std::ios::binary);
      std::ostringstream abuf;
      abuf << ain.rdbuf();
      ann_content = abuf.str();
    }
    BratParseResult r =
        parse_brat_document(txt.stem().string(), tbuf.str(), ann_content, label_map);
    if (skipped) {
      skipped->non_entity_lines += r.skipped.non_entity_lines;
      skipped->unmapped_labels += r.skipped.unmapped_labels;
    }
    corpus.push_back(std::move(r.doc));
  }
  return corpus;
}

std::string stats_to_json(const CorpusStats& stats) {
  nlohmann::ordered_json j;
  j["n_docs"] = stats.n_docs;
  j["n_sentences"] = stats.n_sentences;
  nlohmann::ordered_json per_type;
  for (EntityType t : kAllEntityTypes) {
    per_type[to_string(t)] = stats.per_type[static_cast<std::size_t>(t)];
  }
  j["entities"] = per_type;
  j["total_entities"] = stats.total_entities();
  return j.dump(2) + "\n";
}

std::string split_to_json(const SplitAssignment& split) {
  nlohmann::ordered_json j;
  j["seed"] = split.seed;
  j["train"] = split.train;
  j["validation"] = split.validation;
  j["test"] = split.test;
  return j.dump(2) + "\n";
}

SplitAssignment split_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  SplitAssignment split;
  split.seed = j.at("seed").get<std::uint64_t>();
  split.train = j.at("train").get<std::vector<std::string>>();
  split.validation = j.at("validation").get<std::vector<std::string>>();
  split.test = j.at("test").get<std::vector<std::string>>();
  return split;
}

}  // namespace raredis

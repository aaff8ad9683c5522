#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "raredis/types.hpp"

namespace raredis {

// Maps raw .ann labels (matched case-insensitively) to entity types.
using LabelMap = std::map<std::string, EntityType>;

LabelMap default_label_map();

struct BratSkipReport {
  std::size_t non_entity_lines = 0;  // A/R/E/#/... lines
  std::size_t unmapped_labels = 0;
};

struct BratParseResult {
  Document doc;
  BratSkipReport skipped;
};

class MalformedLineError : public ParseError {
 public:
  using ParseError::ParseError;
};
class SpanOutOfBoundsError : public ParseError {
 public:
  using ParseError::ParseError;
};
class SurfaceMismatchError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Parses one Brat standoff document. Only `T` lines whose label maps under
// label_map become entities; everything else is skipped with counts.
BratParseResult parse_brat_document(const std::string& doc_id,
                                    const std::string& text_content,
                                    const std::string& ann_content,
                                    const LabelMap& label_map = default_label_map());

// Inverse of parse_brat_document for `T` lines.
std::string serialize_brat_entities(const Document& doc);

struct PerDocCounts {
  std::string doc_id;
  std::size_t n_sentences = 0;
  std::array<std::size_t, 4> per_type{};
};

struct CorpusStats {
  std::size_t n_docs = 0;
  std::size_t n_sentences = 0;
  std::array<std::size_t, 4> per_type{};  // indexed by EntityType order
  std::vector<PerDocCounts> per_doc;

  std::size_t total_entities() const {
    std::size_t t = 0;
    for (auto c : per_type) t += c;
    return t;
  }
};

CorpusStats corpus_stats(const std::vector<Document>& corpus);

struct SplitAssignment {
  std::uint64_t seed = 0;
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

class EmptyCorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic 8:1:1 split: seeded shuffle of doc_ids, first floor(0.8n)
// to train, next floor(0.1n) to validation, remainder to test.
SplitAssignment split_corpus(const std::vector<Document>& corpus,
                             std::uint64_t seed);

// Loads paired <stem>.txt / <stem>.ann files from a directory, sorted by
// doc_id. Aggregates skip counts into `skipped` when non-null.
std::vector<Document> load_corpus_dir(const std::string& dir,
                                      const LabelMap& label_map = default_label_map(),
                                      BratSkipReport* skipped = nullptr);

std::string stats_to_json(const CorpusStats& stats);
std::string split_to_json(const SplitAssignment& split);
SplitAssignment split_from_json(const std::string& json_text);

}  // namespace raredis

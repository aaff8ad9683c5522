#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "raredis/types.hpp"

namespace raredis {

enum class MatchRegime { Exact, Relaxed };

class StopWords {
 public:
  StopWords();  // checked-in default list of English function words
  static StopWords from_file(const std::string& path);
  static StopWords empty();

  bool contains(const std::string& lowercase_token) const;

 private:
  explicit StopWords(std::set<std::string> words) : words_(std::move(words)) {}
  std::set<std::string> words_;
};

// Edge-trims leading/trailing stop-word tokens from a span; interior stop
// words are kept. A span made entirely of stop words is returned unchanged
// (all_stopwords set when non-null).
Span trim_stopwords(const Span& span, const std::u32string& text32,
                    const StopWords& stopwords, bool* all_stopwords = nullptr);

struct Counts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

double f1_score(double precision, double recall);
Metrics metrics_from(const Counts& c);

struct RegimeScores {
  std::array<Counts, 4> per_type{};  // indexed by EntityType
  Counts overall;                    // pooled (micro) counts
};

struct MatchReport {
  RegimeScores exact;
  RegimeScores relaxed;
};

class DocMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using DocIndex = std::map<std::string, const Document*>;

DocIndex index_documents(const std::vector<Document>& docs);

// Regime match test on stop-word-trimmed spans. Exact: identical trimmed
// span set and type. Relaxed: >=1 character of overlap and same type.
bool is_match(const Prediction& pred, const GoldEntity& gold,
              MatchRegime regime, const std::u32string& text32,
              const StopWords& stopwords);

// Greedy one-to-one assignment per document and type (exact-span pairs
// first, then larger overlap, then leftmost gold). Matched pairs are TP;
// unmatched predictions (grounded or not) are FP; unmatched golds are FN.
RegimeScores match_and_score(const std::vector<Prediction>& preds,
                             const DocIndex& docs, MatchRegime regime,
                             const StopWords& stopwords);

MatchReport score_all(const std::vector<Prediction>& preds,
                      const DocIndex& docs, const StopWords& stopwords);

// String-mode fallback: normalized surface multiset matching per document
// and type, independent of spans. Reported separately from span mode.
RegimeScores score_string_mode(const std::vector<Prediction>& preds,
                               const DocIndex& docs, const StopWords& stopwords);

std::string report_to_json(const MatchReport& report);
std::string report_to_markdown(const MatchReport& report);

}  // namespace raredis

#include "raredis/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "raredis/text.hpp"

namespace raredis {

namespace {

const std::set<std::string>& default_stopword_set() {
  // Articles, prepositions, conjunctions, pronouns, auxiliaries.
  static const std::set<std::string> words = {
      "a",     "an",    "the",   "of",    "in",   "on",    "at",    "by",
      "for",   "with",  "to",    "from",  "into", "onto",  "over",  "under",
      "about", "above", "below", "between", "during", "through", "within",
      "and",   "or",    "but",   "nor",   "so",   "yet",   "as",    "if",
      "than",  "that",  "this",  "these", "those", "which", "who",  "whom",
      "whose", "it",    "its",   "their", "his",  "her",   "our",   "your",
      "is",    "are",   "was",   "were",  "be",   "been",  "being", "am",
      "do",    "does",  "did",   "has",   "have", "had",   "will",  "would",
      "shall", "should", "can",  "could", "may",  "might", "must",  "not",
  };
  return words;
}

}  // namespace

StopWords::StopWords() : words_(default_stopword_set()) {}

StopWords StopWords::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stop-word file: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = ascii_lower(normalize_ws(line));
    if (!w.empty() && w[0] != '#') words.insert(w);
  }
  return StopWords(std::move(words));
}

StopWords StopWords::empty() { return StopWords(std::set<std::string>{}); }

bool StopWords::contains(const std::string& lowercase_token) const {
  return words_.count(lowercase_token) > 0;
}

Span trim_stopwords(const Span& span, const std::u32string& text32,
                    const StopWords& stopwords, bool* all_stopwords) {
  if (all_stopwords) *all_stopwords = false;
  struct Token {
    std::size_t start, end;
    std::string lower;
  };
  std::vector<Token> tokens;
  std::size_t i = span.start;
  const std::size_t limit = std::min(span.end, text32.size());
  while (i < limit) {
    if (!is_word_char(text32[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::u32string run;
    while (j < limit && is_word_char(text32[j])) {
      run.push_back(lower_cp(text32[j]));
      ++j;
    }
    tokens.push_back({i, j, ascii_lower(utf8_encode(run))});
    i = j;
  }
  if (tokens.empty()) return span;

  std::size_t first = 0, last = tokens.size();
  while (first < last && stopwords.contains(tokens[first].lower)) ++first;
  while (last > first && stopwords.contains(tokens[last - 1].lower)) --last;
  if (first >= last) {
    if (all_stopwords) *all_stopwords = true;
    return span;  // degenerate: everything is a stop word
  }
  return {tokens[first].start, tokens[last - 1].end};
}

double f1_score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Metrics metrics_from(const Counts& c) {
  Metrics m;
  m.precision = (c.tp + c.fp) == 0 ? 0.0
                                   : static_cast<double>(c.tp) /
                                         static_cast<double>(c.tp + c.fp);
  m.recall = (c.tp + c.fn) == 0 ? 0.0
                                : static_cast<double>(c.tp) /
                                      static_cast<double>(c.tp + c.fn);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

DocIndex index_documents(const std::vector<Document>& docs) {
  DocIndex index;
  for (const Document& d : docs) index[d.doc_id] = &d;
  return index;
}

namespace {

std::vector<Span> trimmed_gold_fragments(const GoldEntity& gold,
                                         const std::u32string& text32,
                                         const StopWords& stopwords) {
  std::vector<Span> frags = gold.fragments;
  if (frags.size() == 1) {
    frags[0] = trim_stopwords(frags[0], text32, stopwords);
  } else {
    // edge-trim the entity extent: leading tokens of the first fragment,
    // trailing tokens of the last
    Span lead = trim_stopwords(frags.front(), text32, stopwords);
    Span tail = trim_stopwords(frags.back(), text32, stopwords);
    frags.front().start = lead.start;
    frags.back().end = tail.end;
  }
  return frags;
}

std::size_t overlap_size(const Span& a, const Span& b) {
  std::size_t lo = std::max(a.start, b.start);
  std::size_t hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0;
}

std::size_t overlap_with_fragments(const Span& pred,
                                   const std::vector<Span>& frags) {
  std::size_t total = 0;
  for (const Span& f : frags) total += overlap_size(pred, f);
  return total;
}

bool exact_span_match(const Span& pred, const std::vector<Span>& frags) {
  return frags.size() == 1 && frags[0] == pred;
}

struct Candidate {
  std::size_t pred_idx;
  std::size_t gold_idx;
  bool exact;
  std::size_t overlap;
  std::size_t gold_start;
  std::size_t pred_start;
};

// Exact-span pairs first, then larger overlap, then leftmost gold start,
// then pred start; index tiebreaks keep it deterministic.
void sort_candidates(std::vector<Candidate>& cands) {
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.exact != b.exact) return a.exact;
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.gold_start != b.gold_start) return a.gold_start < b.gold_start;
    if (a.pred_start != b.pred_start) return a.pred_start < b.pred_start;
    if (a.gold_idx != b.gold_idx) return a.gold_idx < b.gold_idx;
    return a.pred_idx < b.pred_idx;
  });
}

}  // namespace

bool is_match(const Prediction& pred, const GoldEntity& gold,
              MatchRegime regime, const std::u32string& text32,
              const StopWords& stopwords) {
  if (!pred.grounded() || pred.etype != gold.etype) return false;
  Span p = trim_stopwords(*pred.span, text32, stopwords);
  std::vector<Span> frags = trimmed_gold_fragments(gold, text32, stopwords);
  if (regime == MatchRegime::Exact) return exact_span_match(p, frags);
  return overlap_with_fragments(p, frags) > 0;
}

RegimeScores match_and_score(const std::vector<Prediction>& preds,
                             const DocIndex& docs, MatchRegime regime,
                             const StopWords& stopwords) {
  // group predictions per document
  std::map<std::string, std::vector<const Prediction*>> by_doc;
  for (const Prediction& p : preds) {
    if (docs.find(p.doc_id) == docs.end()) {
      throw DocMismatchError("prediction references unknown doc_id: " + p.doc_id);
    }
    by_doc[p.doc_id].push_back(&p);
  }

  RegimeScores scores;
  for (const auto& [doc_id, doc_ptr] : docs) {
    const Document& doc = *doc_ptr;
    const std::u32string text32 = utf8_decode(doc.text);
    auto it = by_doc.find(doc_id);
    static const std::vector<const Prediction*> kNone;
    const std::vector<const Prediction*>& doc_preds =
        it == by_doc.end() ? kNone : it->second;

    for (EntityType t : kAllEntityTypes) {
      std::vector<const Prediction*> tp_preds;
      for (const Prediction* p : doc_preds) {
        if (p->etype == t) tp_preds.push_back(p);
      }
      std::vector<const GoldEntity*> t_golds;
      for (const GoldEntity& g : doc.entities) {
        if (g.etype == t) t_golds.push_back(&g);
      }

      std::vector<Span> pred_spans(tp_preds.size());
      std::vector<bool> pred_grounded(tp_preds.size());
      for (std::size_t i = 0; i < tp_preds.size(); ++i) {
        pred_grounded[i] = tp_preds[i]->grounded();
        if (pred_grounded[i]) {
          pred_spans[i] = trim_stopwords(*tp_preds[i]->span, text32, stopwords);
        }
      }
      std::vector<std::vector<Span>> gold_frags(t_golds.size());
      for (std::size_t j = 0; j < t_golds.size(); ++j) {
        gold_frags[j] = trimmed_gold_fragments(*t_golds[j], text32, stopwords);
      }

      std::vector<Candidate> cands;
      for (std::size_t i = 0; i < tp_preds.size(); ++i) {
        if (!pred_grounded[i]) continue;
        for (std::size_t j = 0; j < t_golds.size(); ++j) {
          bool exact = exact_span_match(pred_spans[i], gold_frags[j]);
          std::size_t ov = overlap_with_fragments(pred_spans[i], gold_frags[j]);
          bool eligible = regime == MatchRegime::Exact ? exact : ov > 0;
          if (!eligible) continue;
          cands.push_back({i, j, exact, ov, gold_frags[j].front().start,
                           pred_spans[i].start});
        }
      }
      sort_candidates(cands);

      std::vector<bool> pred_used(tp_preds.size(), false);
      std::vector<bool> gold_used(t_golds.size(), false);
      long tp = 0;
      for (const Candidate& c : cands) {
        if (pred_used[c.pred_idx] || gold_used[c.gold_idx]) continue;
        pred_used[c.pred_idx] = true;
        gold_used[c.gold_idx] = true;
        ++tp;
      }
      Counts counts;
      counts.tp = tp;
      counts.fp = static_cast<long>(tp_preds.size()) - tp;
      counts.fn = static_cast<long>(t_golds.size()) - tp;
      scores.per_type[static_cast<std::size_t>(t)] += counts;
      scores.overall += counts;
    }
  }
  return scores;
}

MatchReport score_all(const std::vector<Prediction>& preds, const DocIndex& docs,
                      const StopWords& stopwords) {
  MatchReport report;
  report.exact = match_and_score(preds, docs, MatchRegime::Exact, stopwords);
  report.relaxed = match_and_score(preds, docs, MatchRegime::Relaxed, stopwords);
  return report;
}

namespace {

// Lowercased, whitespace-normalized, edge stop-word tokens removed.
std::string normalized_surface(const std::string& s, const StopWords& stopwords) {
  std::vector<std::string> toks = word_tokens(s);
  std::size_t first = 0, last = toks.size();
  while (first < last && stopwords.contains(toks[first])) ++first;
  while (last > first && stopwords.contains(toks[last - 1])) --last;
  if (first >= last) {
    first = 0;
    last = toks.size();
  }
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (!out.empty()) out += ' ';
    out += toks[i];
  }
  return out;
}

}  // namespace

RegimeScores score_string_mode(const std::vector<Prediction>& preds,
                               const DocIndex& docs, const StopWords& stopwords) {
  std::map<std::string, std::vector<const Prediction*>> by_doc;
  for (const Prediction& p : preds) {
    if (docs.find(p.doc_id) == docs.end()) {
      throw DocMismatchError("prediction references unknown doc_id: " + p.doc_id);
    }
    by_doc[p.doc_id].push_back(&p);
  }

  RegimeScores scores;
  for (const auto& [doc_id, doc_ptr] : docs) {
    auto it = by_doc.find(doc_id);
    for (EntityType t : kAllEntityTypes) {
      std::map<std::string, long> pred_counts, gold_counts;
      if (it != by_doc.end()) {
        for (const Prediction* p : it->second) {
          if (p->etype != t) continue;
          std::string key = normalized_surface(p->extracted, stopwords);
          if (!key.empty()) ++pred_counts[key];
        }
      }
      for (const GoldEntity& g : doc_ptr->entities) {
        if (g.etype != t) continue;
        std::string key = normalized_surface(g.surface, stopwords);
        if (!key.empty()) ++gold_counts[key];
      }
      long tp = 0, n_pred = 0, n_gold = 0;
      for (const auto& [k, c] : pred_counts) {
        n_pred += c;
        auto git = gold_counts.find(k);
        if (git != gold_counts.end()) tp += std::min(c, git->second);
      }
      for (const auto& [k, c] : gold_counts) n_gold += c;
      Counts counts{tp, n_pred - tp, n_gold - tp};
      scores.per_type[static_cast<std::size_t>(t)] += counts;
      scores.overall += counts;
    }
  }
  return scores;
}

namespace {

nlohmann::ordered_json counts_json(const Counts& c) {
  Metrics m = metrics_from(c);
  nlohmann::ordered_json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  return j;
}

nlohmann::ordered_json regime_json(const RegimeScores& s) {
  nlohmann::ordered_json j;
  for (EntityType t : kAllEntityTypes) {
    j[to_string(t)] = counts_json(s.per_type[static_cast<std::size_t>(t)]);
  }
  j["Overall"] = counts_json(s.overall);
  return j;
}

std::string fmt3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

}  // namespace

std::string report_to_json(const MatchReport& report) {
  nlohmann::ordered_json j;
  j["exact"] = regime_json(report.exact);
  j["relaxed"] = regime_json(report.relaxed);
  return j.dump(2) + "\n";
}

std::string report_to_markdown(const MatchReport& report) {
  std::ostringstream out;
  out << "| Entity | Exact P | Exact R | Exact F1 | Relaxed P | Relaxed R | "
         "Relaxed F1 |\n";
  out << "|---|---|---|---|---|---|---|\n";
  auto row = [&](const std::string& name, const Counts& e, const Counts& r) {
    Metrics me = metrics_from(e);
    Metrics mr = metrics_from(r);
    out << "| " << name << " | " << fmt3(me.precision) << " | " << fmt3(me.recall)
        << " | " << fmt3(me.f1) << " | " << fmt3(mr.precision) << " | "
        << fmt3(mr.recall) << " | " << fmt3(mr.f1) << " |\n";
  };
  for (EntityType t : kAllEntityTypes) {
    row(to_string(t), report.exact.per_type[static_cast<std::size_t>(t)],
        report.relaxed.per_type[static_cast<std::size_t>(t)]);
  }
  row("Overall", report.exact.overall, report.relaxed.overall);
  return out.str();
}

}  // namespace raredis

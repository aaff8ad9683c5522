#include "raredis/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "raredis/text.hpp"

namespace raredis {

const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::BoundaryOnly: return "BoundaryOnly";
    case ErrorCategory::TypeOnly: return "TypeOnly";
    case ErrorCategory::BoundaryAndType: return "BoundaryAndType";
    case ErrorCategory::Spurious: return "Spurious";
    case ErrorCategory::Missed: return "Missed";
  }
  return "?";
}

namespace {

struct Pair {
  std::size_t pred_idx;
  std::size_t gold_idx;
  std::size_t overlap;
  std::size_t gold_start;
  std::size_t pred_start;
};

void sort_pairs(std::vector<Pair>& pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.gold_start != b.gold_start) return a.gold_start < b.gold_start;
    if (a.pred_start != b.pred_start) return a.pred_start < b.pred_start;
    if (a.gold_idx != b.gold_idx) return a.gold_idx < b.gold_idx;
    return a.pred_idx < b.pred_idx;
  });
}

std::size_t overlap_size(const Span& a, const Span& b) {
  std::size_t lo = std::max(a.start, b.start);
  std::size_t hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0;
}

}  // namespace

std::vector<ErrorRecord> classify_errors(const std::vector<Prediction>& preds,
                                         const DocIndex& docs,
                                         const StopWords& stopwords) {
  std::map<std::string, std::vector<const Prediction*>> by_doc;
  for (const Prediction& p : preds) {
    if (docs.find(p.doc_id) == docs.end()) {
      throw DocMismatchError("prediction references unknown doc_id: " + p.doc_id);
    }
    by_doc[p.doc_id].push_back(&p);
  }

  std::vector<ErrorRecord> records;
  for (const auto& [doc_id, doc_ptr] : docs) {
    const Document& doc = *doc_ptr;
    const std::u32string text32 = utf8_decode(doc.text);
    auto it = by_doc.find(doc_id);
    static const std::vector<const Prediction*> kNone;
    const std::vector<const Prediction*>& doc_preds =
        it == by_doc.end() ? kNone : it->second;

    std::vector<std::optional<Span>> pred_spans(doc_preds.size());
    for (std::size_t i = 0; i < doc_preds.size(); ++i) {
      if (doc_preds[i]->grounded()) {
        pred_spans[i] = trim_stopwords(*doc_preds[i]->span, text32, stopwords);
      }
    }
    std::vector<std::vector<Span>> gold_frags(doc.entities.size());
    for (std::size_t j = 0; j < doc.entities.size(); ++j) {
      const GoldEntity& g = doc.entities[j];
      gold_frags[j] = g.fragments;
      if (gold_frags[j].size() == 1) {
        gold_frags[j][0] = trim_stopwords(gold_frags[j][0], text32, stopwords);
      } else {
        Span lead = trim_stopwords(gold_frags[j].front(), text32, stopwords);
        Span tail = trim_stopwords(gold_frags[j].back(), text32, stopwords);
        gold_frags[j].front().start = lead.start;
        gold_frags[j].back().end = tail.end;
      }
    }

    auto exact_match = [&](std::size_t i, std::size_t j) {
      return pred_spans[i] && gold_frags[j].size() == 1 &&
             gold_frags[j][0] == *pred_spans[i];
    };
    auto overlap_of = [&](std::size_t i, std::size_t j) -> std::size_t {
      if (!pred_spans[i]) return 0;
      std::size_t total = 0;
      for (const Span& f : gold_frags[j]) total += overlap_size(*pred_spans[i], f);
      return total;
    };
    auto same_type = [&](std::size_t i, std::size_t j) {
      return doc_preds[i]->etype == doc.entities[j].etype;
    };

    std::vector<bool> pred_used(doc_preds.size(), false);
    std::vector<bool> gold_used(doc.entities.size(), false);

    // stage predicate -> (category, emit record?)
    struct Stage {
      std::function<bool(std::size_t, std::size_t)> eligible;
      std::optional<ErrorCategory> category;  // nullopt -> TP, no record
    };
    std::vector<Stage> stages = {
        {[&](std::size_t i, std::size_t j) {
           return exact_match(i, j) && same_type(i, j);
         },
         std::nullopt},
        {[&](std::size_t i, std::size_t j) {
           return exact_match(i, j) && !same_type(i, j);
         },
         ErrorCategory::TypeOnly},
        {[&](std::size_t i, std::size_t j) {
           return overlap_of(i, j) > 0 && same_type(i, j);
         },
         ErrorCategory::BoundaryOnly},
        {[&](std::size_t i, std::size_t j) {
           return overlap_of(i, j) > 0 && !same_type(i, j);
         },
         ErrorCategory::BoundaryAndType},
    };

    for (const Stage& stage : stages) {
      std::vector<Pair> pairs;
      for (std::size_t i = 0; i < doc_preds.size(); ++i) {
        if (pred_used[i]) continue;
        for (std::size_t j = 0; j < doc.entities.size(); ++j) {
          if (gold_used[j] || !stage.eligible(i, j)) continue;
          pairs.push_back({i, j, overlap_of(i, j), gold_frags[j].front().start,
                           pred_spans[i] ? pred_spans[i]->start : 0});
        }
      }
      sort_pairs(pairs);
      for (const Pair& p : pairs) {
        if (pred_used[p.pred_idx] || gold_used[p.gold_idx]) continue;
        pred_used[p.pred_idx] = true;
        gold_used[p.gold_idx] = true;
        if (stage.category) {
          ErrorRecord rec;
          rec.category = *stage.category;
          rec.doc_id = doc_id;
          rec.pred = *doc_preds[p.pred_idx];
          rec.gold = doc.entities[p.gold_idx];
          rec.attributed_type = doc.entities[p.gold_idx].etype;
          records.push_back(std::move(rec));
        }
      }
    }

    for (std::size_t i = 0; i < doc_preds.size(); ++i) {
      if (pred_used[i]) continue;
      ErrorRecord rec;
      rec.category = ErrorCategory::Spurious;
      rec.doc_id = doc_id;
      rec.pred = *doc_preds[i];
      rec.attributed_type = doc_preds[i]->etype;
      records.push_back(std::move(rec));
    }
    for (std::size_t j = 0; j < doc.entities.size(); ++j) {
      if (gold_used[j]) continue;
      ErrorRecord rec;
      rec.category = ErrorCategory::Missed;
      rec.doc_id = doc_id;
      rec.gold = doc.entities[j];
      rec.attributed_type = doc.entities[j].etype;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

namespace {

// Round-half-up percentages, then repair so each nonempty row sums to 100:
// an overshoot comes out of the largest-count cell, a shortfall goes to the
// cell with the largest rounded-away remainder (larger count on ties).
void fill_percentages(ErrorTableRow& row) {
  if (row.total == 0) return;
  std::array<double, 5> exact{};
  int sum = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    exact[i] = 100.0 * static_cast<double>(row.counts[i]) /
               static_cast<double>(row.total);
    row.percentages[i] = static_cast<int>(std::floor(exact[i] + 0.5));
    sum += row.percentages[i];
  }
  while (sum > 100) {
    std::size_t pick = 5;
    for (std::size_t i = 0; i < 5; ++i) {
      if (row.percentages[i] <= 0) continue;
      if (pick == 5 || row.counts[i] > row.counts[pick]) pick = i;
    }
    if (pick == 5) break;
    --row.percentages[pick];
    --sum;
  }
  while (sum < 100) {
    std::size_t pick = 5;
    double best_rem = -1.0;
    for (std::size_t i = 0; i < 5; ++i) {
      double rem = exact[i] - row.percentages[i];
      if (rem <= 0) continue;
      if (rem > best_rem ||
          (rem == best_rem && pick != 5 && row.counts[i] > row.counts[pick])) {
        best_rem = rem;
        pick = i;
      }
    }
    if (pick == 5) {
      for (std::size_t i = 0; i < 5; ++i) {
        if (pick == 5 || row.counts[i] > row.counts[pick]) pick = i;
      }
    }
    ++row.percentages[pick];
    ++sum;
  }
}

}  // namespace

ErrorTable error_table(const std::vector<ErrorRecord>& records) {
  ErrorTable table;
  for (const ErrorRecord& rec : records) {
    ErrorTableRow& row = table.rows[static_cast<std::size_t>(rec.attributed_type)];
    ++row.counts[static_cast<std::size_t>(rec.category)];
    ++row.total;
  }
  for (ErrorTableRow& row : table.rows) fill_percentages(row);
  return table;
}

std::string error_table_to_markdown(const ErrorTable& table) {
  std::ostringstream out;
  out << "| Entity | Boundary only | Type only | Boundary+Type | Spurious | "
         "Missed | Total |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (EntityType t : kAllEntityTypes) {
    const ErrorTableRow& row = table.rows[static_cast<std::size_t>(t)];
    out << "| " << to_string(t);
    for (std::size_t c = 0; c < 5; ++c) {
      out << " | " << row.counts[c] << " (" << row.percentages[c] << "%)";
    }
    out << " | " << row.total << " |\n";
  }
  return out.str();
}

std::string error_table_to_csv(const ErrorTable& table) {
  std::ostringstream out;
  out << "entity,boundary_only,type_only,boundary_and_type,spurious,missed,total\n";
  for (EntityType t : kAllEntityTypes) {
    const ErrorTableRow& row = table.rows[static_cast<std::size_t>(t)];
    out << to_string(t);
    for (std::size_t c = 0; c < 5; ++c) out << ',' << row.counts[c];
    out << ',' << row.total << '\n';
  }
  return out.str();
}

std::string error_records_to_jsonl(const std::vector<ErrorRecord>& records) {
  std::ostringstream out;
  for (const ErrorRecord& rec : records) {
    nlohmann::ordered_json j;
    j["category"] = to_string(rec.category);
    j["doc_id"] = rec.doc_id;
    j["attributed_type"] = to_string(rec.attributed_type);
    if (rec.pred) {
      nlohmann::ordered_json p;
      p["etype"] = to_string(rec.pred->etype);
      p["extracted"] = rec.pred->extracted;
      if (rec.pred->span) {
        p["start"] = rec.pred->span->start;
        p["end"] = rec.pred->span->end;
      }
      j["pred"] = p;
    }
    if (rec.gold) {
      nlohmann::ordered_json g;
      g["id"] = rec.gold->id;
      g["etype"] = to_string(rec.gold->etype);
      g["surface"] = rec.gold->surface;
      g["start"] = rec.gold->fragments.front().start;
      g["end"] = rec.gold->fragments.back().end;
      j["gold"] = g;
    }
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace raredis

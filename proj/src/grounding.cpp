#include "raredis/grounding.hpp"

#include <algorithm>
#include <set>

#include "raredis/text.hpp"

namespace raredis {

namespace {

// Lowercased whitespace-split tokens as code points.
std::vector<std::u32string> needle_tokens(const std::string& s) {
  std::vector<std::u32string> tokens;
  std::u32string cur;
  for (char32_t c : utf8_decode(s)) {
    if (is_space_char(c)) {
      if (!cur.empty()) {
        tokens.push_back(std::move(cur));
        cur.clear();
      }
    } else {
      cur.push_back(lower_cp(c));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

}  // namespace

std::vector<Span> find_occurrences(const std::u32string& text32,
                                   const std::string& needle) {
  std::vector<Span> occurrences;
  std::vector<std::u32string> tokens = needle_tokens(needle);
  if (tokens.empty()) return occurrences;

  for (std::size_t i = 0; i < text32.size(); ++i) {
    std::size_t pos = i;
    bool ok = true;
    for (std::size_t t = 0; t < tokens.size() && ok; ++t) {
      if (t > 0) {
        // at least one whitespace character between tokens
        if (pos >= text32.size() || !is_space_char(text32[pos])) {
          ok = false;
          break;
        }
        while (pos < text32.size() && is_space_char(text32[pos])) ++pos;
      }
      const std::u32string& tok = tokens[t];
      if (pos + tok.size() > text32.size()) {
        ok = false;
        break;
      }
      for (std::size_t k = 0; k < tok.size(); ++k) {
        if (lower_cp(text32[pos + k]) != tok[k]) {
          ok = false;
          break;
        }
      }
      if (ok) pos += tok.size();
    }
    if (!ok) continue;
    // whole-token boundaries: the match must not begin or end inside an
    // alphanumeric run
    bool starts_word = is_word_char(tokens.front().front());
    bool ends_word = is_word_char(tokens.back().back());
    if (starts_word && i > 0 && is_word_char(text32[i - 1])) continue;
    if (ends_word && pos < text32.size() && is_word_char(text32[pos])) continue;
    occurrences.push_back({i, pos});
  }
  return occurrences;
}

std::vector<Prediction> ground(const std::vector<std::string>& extracted_strings,
                               const Document& doc, EntityType etype) {
  const std::u32string text32 = utf8_decode(doc.text);

  // Longest string first; ties keep input order.
  std::vector<std::size_t> order(extracted_strings.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return extracted_strings[a].size() > extracted_strings[b].size();
  });

  std::set<std::pair<std::size_t, std::size_t>> claimed;
  std::vector<Prediction> out(extracted_strings.size());
  for (std::size_t idx : order) {
    Prediction& pred = out[idx];
    pred.doc_id = doc.doc_id;
    pred.etype = etype;
    pred.extracted = extracted_strings[idx];
    for (const Span& occ : find_occurrences(text32, extracted_strings[idx])) {
      if (claimed.insert({occ.start, occ.end}).second) {
        pred.span = occ;
        break;
      }
    }
  }
  return out;
}

}  // namespace raredis

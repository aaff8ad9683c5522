#include <doctest.h>

#include <random>

#include "raredis/corpus.hpp"
#include "raredis/text.hpp"

using namespace raredis;

TEST_CASE("single entity T line") {
  auto r = parse_brat_document("d1", "cystic fibrosis is...",
                               "T1\tRAREDISEASE 0 15\tcystic fibrosis");
  REQUIRE(r.doc.entities.size() == 1);
  const GoldEntity& e = r.doc.entities[0];
  CHECK(e.etype == EntityType::RareDisease);
  CHECK(e.fragments == std::vector<Span>{{0, 15}});
  CHECK(e.surface == "cystic fibrosis");
}

TEST_CASE("empty annotation file") {
  auto r = parse_brat_document("d1", "anything", "");
  CHECK(r.doc.entities.empty());
}

TEST_CASE("discontinuous span") {
  auto r = parse_brat_document("d1", "a rash on both arms",
                               "T2\tSIGN 2 6;15 19\trash arms");
  REQUIRE(r.doc.entities.size() == 1);
  const GoldEntity& e = r.doc.entities[0];
  CHECK(e.etype == EntityType::Sign);
  CHECK(e.fragments == std::vector<Span>{{2, 6}, {15, 19}});
  CHECK(e.surface == "rash arms");
}

TEST_CASE("non-T and unmapped lines are skipped with counts") {
  auto r = parse_brat_document(
      "d1", "cystic fibrosis here",
      "T1\tRAREDISEASE 0 15\tcystic fibrosis\n"
      "A1\tNegation T1\n"
      "#1\tAnnotatorNotes T1\tnote\n"
      "T2\tANAPHOR 16 20\there\n");
  CHECK(r.doc.entities.size() == 1);
  CHECK(r.skipped.non_entity_lines == 2);
  CHECK(r.skipped.unmapped_labels == 1);
}

TEST_CASE("label map is case-insensitive and overridable") {
  auto r = parse_brat_document("d1", "pain", "T1\tSymPtom 0 4\tpain");
  CHECK(r.doc.entities[0].etype == EntityType::Symptom);

  LabelMap custom = {{"RD", EntityType::RareDisease}};
  auto r2 = parse_brat_document("d1", "pain", "T1\trd 0 4\tpain", custom);
  CHECK(r2.doc.entities[0].etype == EntityType::RareDisease);
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(parse_brat_document("d", "abc", "T1 no tabs"),
                  MalformedLineError);
  CHECK_THROWS_AS(parse_brat_document("d", "abc", "T1\tSIGN 0 99\tabc"),
                  SpanOutOfBoundsError);
  CHECK_THROWS_AS(parse_brat_document("d", "abc", "T1\tSIGN 0 3\txyz"),
                  SurfaceMismatchError);
  CHECK_THROWS_AS(parse_brat_document("d", "abc", "T1\tSIGN 2 1\tc"),
                  MalformedLineError);
}

TEST_CASE("offsets count code points, not bytes") {
  // "é" is two bytes but one scalar value
  auto r = parse_brat_document("d1", "étrange rash", "T1\tSIGN 8 12\trash");
  CHECK(r.doc.entities[0].surface == "rash");
}

TEST_CASE("surface whitespace normalization tolerated") {
  // newline inside the entity; .ann surfaces conventionally use a space
  auto r = parse_brat_document("d1", "big\nrash", "T1\tSIGN 0 8\tbig rash");
  CHECK(r.doc.entities[0].surface == "big\nrash");
}

namespace {

Document random_brat_document(std::mt19937_64& rng, std::size_t idx) {
  static const char* words[] = {"rash",  "fever", "pain",   "anthrax",
                                "cough", "lungs", "kidney", "syndrome"};
  std::string text;
  std::size_t n_words = 5 + rng() % 30;
  for (std::size_t i = 0; i < n_words; ++i) {
    if (i > 0) text += ' ';
    text += words[rng() % 8];
  }
  std::u32string text32 = utf8_decode(text);

  Document doc;
  doc.doc_id = "doc" + std::to_string(idx);
  doc.text = text;
  std::size_t n_entities = rng() % 5;
  for (std::size_t i = 0; i < n_entities; ++i) {
    GoldEntity e;
    e.id = "T" + std::to_string(i + 1);
    e.etype = kAllEntityTypes[rng() % 4];
    std::size_t n_frags = 1 + rng() % 3;
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < n_frags && cursor + 2 <= text32.size(); ++f) {
      std::size_t start = cursor + rng() % (text32.size() - cursor - 1);
      std::size_t end = start + 1 + rng() % (text32.size() - start);
      e.fragments.push_back({start, end});
      cursor = end + 1;
    }
    if (e.fragments.empty()) continue;
    std::u32string s;
    for (std::size_t f = 0; f < e.fragments.size(); ++f) {
      if (f > 0) s.push_back(U' ');
      s.append(text32.begin() + static_cast<std::ptrdiff_t>(e.fragments[f].start),
               text32.begin() + static_cast<std::ptrdiff_t>(e.fragments[f].end));
    }
    e.surface = utf8_encode(s);
    doc.entities.push_back(std::move(e));
  }
  return doc;
}

}  // namespace

TEST_CASE("round-trip: serialize then reparse equals original") {
  std::mt19937_64 rng(7);
  for (std::size_t iter = 0; iter < 1000; ++iter) {
    Document doc = random_brat_document(rng, iter);
    std::string ann = serialize_brat_entities(doc);
    auto r = parse_brat_document(doc.doc_id, doc.text, ann);
    REQUIRE(r.doc.entities.size() == doc.entities.size());
    for (std::size_t i = 0; i < doc.entities.size(); ++i) {
      CHECK(r.doc.entities[i].id == doc.entities[i].id);
      CHECK(r.doc.entities[i].etype == doc.entities[i].etype);
      CHECK(r.doc.entities[i].fragments == doc.entities[i].fragments);
      CHECK(r.doc.entities[i].surface == doc.entities[i].surface);
    }
  }
}

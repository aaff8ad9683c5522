#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "raredis/evaluation.hpp"
#include "raredis/text.hpp"

using namespace raredis;

namespace {

Document make_doc(std::string id, std::string text,
                  std::vector<GoldEntity> entities = {}) {
  return {std::move(id), std::move(text), std::move(entities)};
}

GoldEntity gold(EntityType t, std::size_t start, std::size_t end,
                std::string id = "T1") {
  return {std::move(id), t, {{start, end}}, ""};
}

Prediction pred(std::string doc_id, EntityType t, std::size_t start,
                std::size_t end) {
  Prediction p;
  p.doc_id = std::move(doc_id);
  p.etype = t;
  p.extracted = "x";
  p.span = Span{start, end};
  return p;
}

}  // namespace

TEST_CASE("stop-word trimming") {
  StopWords sw;
  std::u32string text = utf8_decode("the kidney disease of the");
  CHECK(trim_stopwords({0, 18}, text, sw) == Span{4, 18});  // "kidney disease"
  std::u32string plain = utf8_decode("hydronephrosis");
  CHECK(trim_stopwords({0, 14}, plain, sw) == Span{0, 14});
  // all stop words: returned unchanged, flagged
  std::u32string degenerate = utf8_decode("of the");
  bool all = false;
  CHECK(trim_stopwords({0, 6}, degenerate, sw, &all) == Span{0, 6});
  CHECK(all);
}

TEST_CASE("is_match under both regimes") {
  StopWords none = StopWords::empty();
  std::u32string text32(40, U'x');
  CHECK(is_match(pred("d", EntityType::RareDisease, 10, 25),
                 gold(EntityType::RareDisease, 10, 25), MatchRegime::Exact, text32,
                 none));
  CHECK(is_match(pred("d", EntityType::Sign, 10, 20), gold(EntityType::Sign, 15, 30),
                 MatchRegime::Relaxed, text32, none));
  CHECK_FALSE(is_match(pred("d", EntityType::Sign, 10, 20),
                       gold(EntityType::Sign, 15, 30), MatchRegime::Exact, text32,
                       none));
  // type must agree even under relaxed match
  CHECK_FALSE(is_match(pred("d", EntityType::Disease, 10, 25),
                       gold(EntityType::RareDisease, 10, 25), MatchRegime::Relaxed,
                       text32, none));
}

TEST_CASE("metric formulas") {
  Counts c{3, 1, 2};
  Metrics m = metrics_from(c);
  CHECK(m.precision == doctest::Approx(0.75));
  CHECK(m.recall == doctest::Approx(0.6));
  CHECK(m.f1 == doctest::Approx(2 * 0.75 * 0.6 / 1.35));
  CHECK(f1_score(0.681, 0.698) == doctest::Approx(0.689).epsilon(0.002));
  // zero-denominator conventions
  Metrics z = metrics_from({0, 0, 0});
  CHECK(z.precision == 0.0);
  CHECK(z.recall == 0.0);
  CHECK(z.f1 == 0.0);
}

TEST_CASE("perfect predictions score 1 under both regimes") {
  Document doc = make_doc("d", std::string(60, 'x'),
                          {gold(EntityType::RareDisease, 5, 10, "T1"),
                           gold(EntityType::Sign, 20, 30, "T2")});
  std::vector<Prediction> preds = {pred("d", EntityType::RareDisease, 5, 10),
                                   pred("d", EntityType::Sign, 20, 30)};
  DocIndex docs;
  docs["d"] = &doc;
  StopWords none = StopWords::empty();
  for (MatchRegime regime : {MatchRegime::Exact, MatchRegime::Relaxed}) {
    RegimeScores s = match_and_score(preds, docs, regime, none);
    Metrics m = metrics_from(s.overall);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
  }
}

TEST_CASE("unknown doc_id raises DocMismatch") {
  Document doc = make_doc("d", "xxxx");
  DocIndex docs;
  docs["d"] = &doc;
  StopWords none = StopWords::empty();
  std::vector<Prediction> preds = {pred("other", EntityType::Sign, 0, 2)};
  CHECK_THROWS_AS(match_and_score(preds, docs, MatchRegime::Exact, none),
                  DocMismatchError);
}

TEST_CASE("ungrounded predictions count as false positives") {
  Document doc = make_doc("d", std::string(20, 'x'), {gold(EntityType::Sign, 0, 5)});
  Prediction ungrounded;
  ungrounded.doc_id = "d";
  ungrounded.etype = EntityType::Sign;
  ungrounded.extracted = "paraphrased thing";
  DocIndex docs;
  docs["d"] = &doc;
  StopWords none = StopWords::empty();
  RegimeScores s = match_and_score({ungrounded}, docs, MatchRegime::Relaxed, none);
  CHECK(s.overall.tp == 0);
  CHECK(s.overall.fp == 1);
  CHECK(s.overall.fn == 1);
}

namespace {

struct RandomInstance {
  Document doc;
  std::vector<Prediction> preds;
};

RandomInstance random_instance(std::mt19937_64& rng) {
  RandomInstance inst;
  inst.doc.doc_id = "d";
  inst.doc.text = std::string(30, 'x');
  std::size_t n_golds = rng() % 7;
  std::size_t n_preds = rng() % 7;
  for (std::size_t i = 0; i < n_golds; ++i) {
    std::size_t s = rng() % 28;
    std::size_t e = s + 1 + rng() % 3;
    inst.doc.entities.push_back(
        gold(kAllEntityTypes[rng() % 4], s, std::min<std::size_t>(e, 30),
             "T" + std::to_string(i)));
  }
  for (std::size_t i = 0; i < n_preds; ++i) {
    std::size_t s = rng() % 28;
    std::size_t e = s + 1 + rng() % 3;
    inst.preds.push_back(
        pred("d", kAllEntityTypes[rng() % 4], s, std::min<std::size_t>(e, 30)));
  }
  return inst;
}

int oracle_tp(const RandomInstance& inst, MatchRegime regime) {
  // brute-force maximum matching on the regime's eligibility graph
  StopWords none = StopWords::empty();
  std::u32string text32 = utf8_decode(inst.doc.text);
  std::vector<std::vector<int>> adj(inst.preds.size());
  for (std::size_t i = 0; i < inst.preds.size(); ++i) {
    for (std::size_t j = 0; j < inst.doc.entities.size(); ++j) {
      if (is_match(inst.preds[i], inst.doc.entities[j], regime, text32, none)) {
        adj[i].push_back(static_cast<int>(j));
      }
    }
  }
  return test_oracle::max_bipartite_matching(
      adj, static_cast<int>(inst.doc.entities.size()));
}

}  // namespace

TEST_CASE("greedy TP equals maximum matching TP under exact regime") {
  std::mt19937_64 rng(17);
  StopWords none = StopWords::empty();
  for (int iter = 0; iter < 2000; ++iter) {
    RandomInstance inst = random_instance(rng);
    DocIndex docs;
    docs["d"] = &inst.doc;
    RegimeScores s = match_and_score(inst.preds, docs, MatchRegime::Exact, none);
    CHECK(s.overall.tp == oracle_tp(inst, MatchRegime::Exact));
  }
}

TEST_CASE("accounting identities hold under both regimes") {
  std::mt19937_64 rng(19);
  StopWords none = StopWords::empty();
  for (int iter = 0; iter < 2000; ++iter) {
    RandomInstance inst = random_instance(rng);
    DocIndex docs;
    docs["d"] = &inst.doc;
    for (MatchRegime regime : {MatchRegime::Exact, MatchRegime::Relaxed}) {
      RegimeScores s = match_and_score(inst.preds, docs, regime, none);
      CHECK(s.overall.tp + s.overall.fp == static_cast<long>(inst.preds.size()));
      CHECK(s.overall.tp + s.overall.fn ==
            static_cast<long>(inst.doc.entities.size()));
      // micro identity
      long tp = 0, fp = 0, fn = 0;
      for (const Counts& c : s.per_type) {
        tp += c.tp;
        fp += c.fp;
        fn += c.fn;
      }
      CHECK(tp == s.overall.tp);
      CHECK(fp == s.overall.fp);
      CHECK(fn == s.overall.fn);
    }
  }
}

TEST_CASE("relaxed F1 >= exact F1 per type") {
  std::mt19937_64 rng(23);
  StopWords none = StopWords::empty();
  for (int iter = 0; iter < 2000; ++iter) {
    RandomInstance inst = random_instance(rng);
    DocIndex docs;
    docs["d"] = &inst.doc;
    RegimeScores exact = match_and_score(inst.preds, docs, MatchRegime::Exact, none);
    RegimeScores relaxed =
        match_and_score(inst.preds, docs, MatchRegime::Relaxed, none);
    for (std::size_t t = 0; t < 4; ++t) {
      CHECK(metrics_from(relaxed.per_type[t]).f1 >=
            metrics_from(exact.per_type[t]).f1);
    }
  }
}

TEST_CASE("string-mode fallback scores normalized surfaces") {
  Document doc = make_doc("d", "the cystic fibrosis case");
  doc.entities = {{"T1", EntityType::RareDisease, {{4, 19}}, "cystic fibrosis"}};
  Prediction p;
  p.doc_id = "d";
  p.etype = EntityType::RareDisease;
  p.extracted = "The Cystic Fibrosis";  // ungrounded, differs by case + stopword
  DocIndex docs;
  docs["d"] = &doc;
  StopWords sw;
  RegimeScores s = score_string_mode({p}, docs, sw);
  CHECK(s.overall.tp == 1);
  CHECK(s.overall.fp == 0);
  CHECK(s.overall.fn == 0);
}

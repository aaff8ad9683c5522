#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "raredis/selection.hpp"

using namespace raredis;

namespace {

Document make_doc(std::string id, std::string text) {
  return {std::move(id), std::move(text), {}};
}

}  // namespace

TEST_CASE("identical documents get identical vectors") {
  VectorMap v = vectorize({make_doc("a", "pain in the arm"),
                           make_doc("b", "pain in the arm")});
  CHECK(v["a"].sparse == v["b"].sparse);
}

TEST_CASE("no alphanumeric tokens yields a zero vector") {
  VectorMap v = vectorize({make_doc("a", "!!! ... ---"), make_doc("b", "words here")});
  CHECK(v["a"].is_zero());
  CHECK_FALSE(v["b"].is_zero());
}

TEST_CASE("three-document fixture matches the hand-computed cosine oracle") {
  // tf-idf with idf = ln((1+N)/(1+df)) + 1 over {"a b", "a c", "d"}
  VectorMap v = vectorize({make_doc("d1", "a b"), make_doc("d2", "a c"),
                           make_doc("d3", "d")});
  CHECK(cosine(v["d1"], v["d2"]) == doctest::Approx(0.3664468163).epsilon(1e-9));
  CHECK(cosine(v["d1"], v["d3"]) == doctest::Approx(0.0));
  CHECK(cosine(v["d2"], v["d3"]) == doctest::Approx(0.0));
}

TEST_CASE("self-similarity of a non-empty document is 1") {
  VectorMap v = vectorize({make_doc("a", "kidney disease of the kidney"),
                           make_doc("b", "unrelated words entirely")});
  CHECK(std::abs(cosine(v["a"], v["a"]) - 1.0) < 1e-9);
}

TEST_CASE("select_random basics") {
  std::vector<Document> one = {make_doc("only", "text")};
  CHECK(select_random(one, 7, "t1").doc_id == "only");

  std::vector<Document> train;
  for (int i = 0; i < 4; ++i) train.push_back(make_doc("d" + std::to_string(i), "x"));
  CHECK(select_random(train, 5, "t9").doc_id == select_random(train, 5, "t9").doc_id);
  CHECK_THROWS_AS(select_random({}, 1, "t"), EmptyTrainingSetError);
}

TEST_CASE("select_random is uniform over fresh seeds") {
  std::vector<Document> train;
  for (int i = 0; i < 4; ++i) train.push_back(make_doc("d" + std::to_string(i), "x"));
  std::map<std::string, int> counts;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    ++counts[select_random(train, static_cast<std::uint64_t>(s), "test").doc_id];
  }
  for (const auto& [id, c] : counts) {
    double freq = static_cast<double>(c) / draws;
    CHECK(std::abs(freq - 0.25) < 0.02);
  }
}

TEST_CASE("select_similar trivial cases") {
  std::vector<Document> train = {make_doc("t1", "completely different words"),
                                 make_doc("t2", "cystic fibrosis affects lungs")};
  Document test = make_doc("probe", "cystic fibrosis affects lungs");
  std::vector<Document> pool = train;
  pool.push_back(test);
  VectorMap v = vectorize(pool);
  CHECK(select_similar(train, test, v).doc_id == "t2");

  std::vector<Document> one = {make_doc("only", "anything")};
  std::vector<Document> pool1 = {one[0], test};
  CHECK(select_similar(one, test, vectorize(pool1)).doc_id == "only");
}

TEST_CASE("fixture argmax: test 'a b e' picks the 'a b' document") {
  std::vector<Document> train = {make_doc("d1", "a b"), make_doc("d2", "a c"),
                                 make_doc("d3", "d")};
  Document test = make_doc("probe", "a b e");
  std::vector<Document> pool = train;
  pool.push_back(test);
  CHECK(select_similar(train, test, vectorize(pool)).doc_id == "d1");
}

TEST_CASE("all-zero similarity falls back to the seeded random pick") {
  std::vector<Document> train = {make_doc("d1", "alpha"), make_doc("d2", "beta")};
  Document test = make_doc("probe", "???");
  std::vector<Document> pool = train;
  pool.push_back(test);
  VectorMap v = vectorize(pool);
  const Document& picked = select_similar(train, test, v, 123);
  CHECK(picked.doc_id == select_random(train, 123, "probe").doc_id);
}

TEST_CASE("scaling all vectors by a positive constant never changes the pick") {
  std::mt19937_64 rng(21);
  static const char* vocab[] = {"pain", "rash", "fever", "cough", "ache", "lungs"};
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Document> train;
    std::size_t n = 2 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      std::string text;
      std::size_t words = 1 + rng() % 10;
      for (std::size_t w = 0; w < words; ++w) {
        if (w) text += ' ';
        text += vocab[rng() % 6];
      }
      train.push_back(make_doc("d" + std::to_string(i), text));
    }
    Document test = make_doc("probe", std::string(vocab[rng() % 6]) + " " +
                                          vocab[rng() % 6]);
    std::vector<Document> pool = train;
    pool.push_back(test);
    VectorMap v = vectorize(pool);
    VectorMap scaled = v;
    double factor = 0.5 + static_cast<double>(rng() % 100);
    for (auto& [id, vec] : scaled) {
      for (auto& [term, w] : vec.sparse) w *= factor;
    }
    CHECK(select_similar(train, test, v, 9).doc_id ==
          select_similar(train, test, scaled, 9).doc_id);
  }
}

TEST_CASE("selected document maximizes cosine over the whole training set") {
  std::vector<Document> train = {make_doc("d1", "a b"), make_doc("d2", "a c"),
                                 make_doc("d3", "d"), make_doc("d4", "a b e f")};
  Document test = make_doc("probe", "a b e");
  std::vector<Document> pool = train;
  pool.push_back(test);
  VectorMap v = vectorize(pool);
  const Document& best = select_similar(train, test, v);
  double best_sim = cosine(v[best.doc_id], v["probe"]);
  for (const Document& d : train) {
    CHECK(best_sim >= cosine(v[d.doc_id], v["probe"]));
  }
}

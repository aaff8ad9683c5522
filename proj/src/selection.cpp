#include "raredis/selection.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "raredis/text.hpp"

namespace raredis {

bool DocVector::is_zero() const {
  if (is_dense()) {
    for (double v : dense) {
      if (v != 0.0) return false;
    }
    return true;
  }
  for (const auto& [term, w] : sparse) {
    if (w != 0.0) return false;
  }
  return true;
}

double cosine(const DocVector& a, const DocVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  if (a.is_dense() || b.is_dense()) {
    if (!a.is_dense() || !b.is_dense() || a.dense.size() != b.dense.size()) {
      return 0.0;  // mixed providers are not comparable
    }
    for (std::size_t i = 0; i < a.dense.size(); ++i) {
      dot += a.dense[i] * b.dense[i];
      na += a.dense[i] * a.dense[i];
      nb += b.dense[i] * b.dense[i];
    }
  } else {
    for (const auto& [term, w] : a.sparse) {
      na += w * w;
      auto it = b.sparse.find(term);
      if (it != b.sparse.end()) dot += w * it->second;
    }
    for (const auto& [term, w] : b.sparse) nb += w * w;
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

VectorMap vectorize(const std::vector<Document>& corpus) {
  const double n = static_cast<double>(corpus.size());
  std::map<std::string, double> df;
  std::vector<std::map<std::string, double>> tfs;
  tfs.reserve(corpus.size());
  for (const Document& doc : corpus) {
    std::map<std::string, double> tf;
    for (const std::string& tok : word_tokens(doc.text)) tf[tok] += 1.0;
    for (const auto& [term, cnt] : tf) df[term] += 1.0;
    tfs.push_back(std::move(tf));
  }
  VectorMap out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    DocVector v;
    for (const auto& [term, cnt] : tfs[i]) {
      double idf = std::log((1.0 + n) / (1.0 + df[term])) + 1.0;
      v.sparse[term] = cnt * idf;
    }
    out[corpus[i].doc_id] = std::move(v);
  }
  return out;
}

VectorMap load_embeddings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embeddings file: " + path);
  VectorMap out;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": missing tab");
    }
    DocVector v;
    std::istringstream vals(line.substr(tab + 1));
    std::string field;
    while (std::getline(vals, field, ',')) {
      double x = std::stod(field);
      if (!std::isfinite(x)) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": non-finite value");
      }
      v.dense.push_back(x);
    }
    if (dim == 0) dim = v.dense.size();
    if (v.dense.size() != dim) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": dimension mismatch");
    }
    out[line.substr(0, tab)] = std::move(v);
  }
  return out;
}

const Document& select_random(const std::vector<Document>& train,
                              std::uint64_t seed,
                              const std::string& test_doc_id) {
  if (train.empty()) throw EmptyTrainingSetError("training set is empty");
  // Fold the test doc_id into the seed so each test document draws its own
  // reproducible example.
  std::uint64_t mixed = seed ^ fnv1a64(test_doc_id);
  std::mt19937_64 rng(mixed);
  return train[static_cast<std::size_t>(rng() % train.size())];
}

const Document& select_similar(const std::vector<Document>& train,
                               const Document& test_doc,
                               const VectorMap& vectors,
                               std::uint64_t fallback_seed) {
  if (train.empty()) throw EmptyTrainingSetError("training set is empty");
  static const DocVector kZero;
  auto vec_of = [&](const std::string& id) -> const DocVector& {
    auto it = vectors.find(id);
    return it == vectors.end() ? kZero : it->second;
  };
  const DocVector& test_vec = vec_of(test_doc.doc_id);

  const Document* best = nullptr;
  double best_sim = 0.0;
  bool any_nonzero = false;
  for (const Document& cand : train) {
    double sim = cosine(vec_of(cand.doc_id), test_vec);
    if (sim != 0.0) any_nonzero = true;
    if (best == nullptr || sim > best_sim ||
        (sim == best_sim && cand.doc_id < best->doc_id)) {
      best = &cand;
      best_sim = sim;
    }
  }
  if (!any_nonzero) {
    return select_random(train, fallback_seed, test_doc.doc_id);
  }
  return *best;
}

}  // namespace raredis

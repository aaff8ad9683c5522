#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "raredis/types.hpp"

namespace raredis {

// Either a sparse TF-IDF bag or a dense externally supplied embedding.
struct DocVector {
  std::map<std::string, double> sparse;
  std::vector<double> dense;

  bool is_dense() const { return !dense.empty(); }
  bool is_zero() const;
};

using VectorMap = std::map<std::string, DocVector>;

class EmptyTrainingSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double cosine(const DocVector& a, const DocVector& b);

// TF-IDF over lowercase alphanumeric tokens; idf = ln((1+N)/(1+df)) + 1.
VectorMap vectorize(const std::vector<Document>& corpus);

// Loads `doc_id<TAB>v1,v2,...,vk` records.
VectorMap load_embeddings_file(const std::string& path);

// Uniform draw, deterministic per (seed, test doc_id).
const Document& select_random(const std::vector<Document>& train,
                              std::uint64_t seed,
                              const std::string& test_doc_id);

// Argmax cosine similarity against test_doc; ties broken by smallest
// doc_id. Falls back to select_random(seed=fallback_seed) when every
// candidate similarity is zero-based (zero vectors on either side).
const Document& select_similar(const std::vector<Document>& train,
                               const Document& test_doc,
                               const VectorMap& vectors,
                               std::uint64_t fallback_seed = 0);

}  // namespace raredis

// Test-only oracles, independent of the library's matching code paths.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace test_oracle {

// Maximum-cardinality bipartite matching (Kuhn's augmenting paths) over an
// adjacency list preds -> golds.
inline int max_bipartite_matching(const std::vector<std::vector<int>>& adj,
                                  int n_golds) {
  std::vector<int> match_gold(static_cast<std::size_t>(n_golds), -1);
  int matched = 0;
  std::vector<char> visited;
  std::function<bool(int)> try_augment = [&](int p) -> bool {
    for (int g : adj[static_cast<std::size_t>(p)]) {
      if (visited[static_cast<std::size_t>(g)]) continue;
      visited[static_cast<std::size_t>(g)] = 1;
      if (match_gold[static_cast<std::size_t>(g)] < 0 ||
          try_augment(match_gold[static_cast<std::size_t>(g)])) {
        match_gold[static_cast<std::size_t>(g)] = p;
        return true;
      }
    }
    return false;
  };
  for (int p = 0; p < static_cast<int>(adj.size()); ++p) {
    visited.assign(static_cast<std::size_t>(n_golds), 0);
    if (try_augment(p)) ++matched;
  }
  return matched;
}

}  // namespace test_oracle

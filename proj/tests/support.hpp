#pragma once

// Shared generators and brute-force oracles for the unit suites.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <random>
#include <utility>
#include <vector>

#include "treephase/tree.hpp"

namespace testing_support {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

/// Random recursive tree on n vertices with shuffled labels, so the edge list
/// is far from breadth-first order.
inline EdgeList random_tree_edges(std::size_t n, std::mt19937_64& rng) {
  if (n < 2) return {};
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = i;
  std::shuffle(label.begin() + 1, label.end(), rng);
  EdgeList edges;
  for (std::size_t v = 1; v < n; ++v) {
    std::uniform_int_distribution<std::size_t> pick(0, v - 1);
    edges.emplace_back(label[pick(rng)], label[v]);
  }
  // The root is the first listed vertex; keep label[0] first, shuffle the rest.
  std::shuffle(edges.begin() + 1, edges.end(), rng);
  for (auto& e : edges) {
    if (std::uniform_int_distribution<int>(0, 1)(rng) && e.first != label[0]) std::swap(e.first, e.second);
  }
  if (!edges.empty() && edges.front().first != label[0]) std::swap(edges.front().first, edges.front().second);
  return edges;
}

/// All-pairs distances by breadth-first search from every vertex.
inline std::vector<std::vector<int>> bfs_distances(const treephase::Tree& t) {
  const std::size_t n = t.vertex_count();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
  for (std::size_t s = 0; s < n; ++s) {
    std::deque<std::size_t> queue{s};
    d[s][s] = 0;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t w : t.neighbors(u)) {
        if (d[s][w] < 0) {
          d[s][w] = d[s][u] + 1;
          queue.push_back(w);
        }
      }
    }
  }
  return d;
}

inline std::vector<double> random_vector(std::size_t dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(dim);
  for (double& x : v) x = g(rng);
  return v;
}

}  // namespace testing_support

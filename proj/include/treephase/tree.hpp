#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace treephase {

using Vertex = std::size_t;
/// Edges are identified by their child endpoint; EdgeId 0 (the root) is unused.
using EdgeId = std::size_t;

inline constexpr Vertex kNoVertex = static_cast<Vertex>(-1);
inline constexpr std::size_t kDefaultVertexCap = std::size_t{1} << 24;

enum class TreeKind { Regular, Cayley, Custom };

/// Description of a truncated rooted tree. `degree` is q for Regular and the
/// free-group rank d for Cayley (the Cayley tree of F_d is regular(2d)).
struct TreeSpec {
  TreeKind kind = TreeKind::Regular;
  int degree = 3;
  int depth = 0;
  /// Custom only: undirected edges in source indexing; edges.front().first is the root.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t vertex_cap = kDefaultVertexCap;

  static TreeSpec regular(int q, int depth);
  static TreeSpec cayley(int d, int depth);
  static TreeSpec custom(std::vector<std::pair<std::size_t, std::size_t>> edges);

  /// Degree of every non-leaf vertex for Regular/Cayley.
  int vertex_degree() const;
  /// "regular(3)", "cayley(2)" or "custom(V)".
  std::string descriptor() const;
};

/// Parses the edge-list format: one "u v" pair per line, 0-based, the first
/// listed vertex is the root. Blank lines and lines starting with '#' are skipped.
TreeSpec parse_edge_list(std::istream& in);
TreeSpec load_edge_list(const std::string& path);

/// Immutable truncated tree with breadth-first vertex indexing (root = 0).
/// Children of a vertex occupy consecutive indices, so every depth level is a
/// contiguous index range.
class Tree {
 public:
  std::size_t vertex_count() const { return parent_.size(); }
  std::size_t edge_count() const { return parent_.size() - 1; }
  Vertex root() const { return 0; }
  Vertex parent(Vertex v) const { return parent_[v]; }
  int depth(Vertex v) const { return depth_[v]; }
  int height() const { return static_cast<int>(level_begin_.size()) - 2; }
  std::span<const Vertex> neighbors(Vertex v) const;
  std::span<const Vertex> children(Vertex v) const;
  /// Vertices of depth n, as the index range [first, first + size).
  std::pair<Vertex, std::size_t> level(int n) const;
  /// True iff a lies on [root, b] (a == b included).
  bool is_ancestor(Vertex a, Vertex b) const { return tin_[a] <= tin_[b] && tout_[b] <= tout_[a]; }
  /// Index of v in the source edge list (identity for generated trees).
  std::size_t source_index(Vertex v) const { return source_[v]; }
  const TreeSpec& spec() const { return spec_; }
  void check_vertex(Vertex v) const;

 private:
  friend Tree build_tree(const TreeSpec& spec);
  Tree() = default;
  void finalize();

  TreeSpec spec_;
  std::vector<Vertex> parent_;
  std::vector<int> depth_;
  std::vector<std::size_t> child_begin_;  // children of v are [child_begin_[v], child_begin_[v+1])
  std::vector<Vertex> child_list_;
  std::vector<std::size_t> adj_begin_;
  std::vector<Vertex> adj_list_;
  std::vector<std::size_t> level_begin_;
  std::vector<std::size_t> tin_, tout_;
  std::vector<std::size_t> source_;
};

Tree build_tree(const TreeSpec& spec);

/// Vertex counts per depth 0..depth for Regular/Cayley without building.
std::vector<double> sphere_sizes(const TreeSpec& spec, int depth);

struct PathInfo {
  int distance = 0;
  std::vector<Vertex> segment;  // x, ..., y
  int confluence_depth = 0;     // depth of the last common vertex of [root,x] and [root,y]
  Vertex confluence = 0;
};

PathInfo path_metrics(const Tree& tree, Vertex x, Vertex y);

/// Last common vertex of [root,x] and [root,y].
Vertex confluence_vertex(const Tree& tree, Vertex x, Vertex y);

struct GrowthProfile {
  std::vector<double> sphere;
  std::vector<double> ball;
  double delta_estimate = 0.0;
  std::optional<double> delta_exact;
};

/// Sphere/ball growth up to n_max and the Poincare exponent estimate: the
/// least-squares slope of log ball(n) over n in [n_max - n_max/2, n_max].
GrowthProfile growth_profile(const TreeSpec& spec, int n_max);

/// Exact exponent: log(q-1) for regular(q), log(2d-1) for cayley(d).
std::optional<double> exact_growth_exponent(const TreeSpec& spec);

/// Sparse real vector keyed by edge id, entries sorted by id.
struct EdgeCoordinates {
  std::vector<std::pair<EdgeId, double>> entries;

  double squared_norm() const;
  friend double dot(const EdgeCoordinates& a, const EdgeCoordinates& b);
  friend EdgeCoordinates operator-(const EdgeCoordinates& a, const EdgeCoordinates& b);
};

/// Coordinates of iota(v) - iota(root) in the orthonormal edge basis of the
/// quadratic embedding: 1 on every edge of [root, v].
EdgeCoordinates embed_coordinates(const Tree& tree, Vertex v);

}  // namespace treephase

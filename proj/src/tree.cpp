#include "treephase/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "treephase/error.hpp"
#include "treephase/stats.hpp"

namespace treephase {

TreeSpec TreeSpec::regular(int q, int depth) {
  TreeSpec s;
  s.kind = TreeKind::Regular;
  s.degree = q;
  s.depth = depth;
  return s;
}

TreeSpec TreeSpec::cayley(int d, int depth) {
  TreeSpec s;
  s.kind = TreeKind::Cayley;
  s.degree = d;
  s.depth = depth;
  return s;
}

TreeSpec TreeSpec::custom(std::vector<std::pair<std::size_t, std::size_t>> edges) {
  TreeSpec s;
  s.kind = TreeKind::Custom;
  s.degree = 0;
  s.edges = std::move(edges);
  return s;
}

int TreeSpec::vertex_degree() const {
  switch (kind) {
    case TreeKind::Regular: return degree;
    case TreeKind::Cayley: return 2 * degree;
    case TreeKind::Custom: break;
  }
  throw Error(ErrorCode::InvalidArgument, "custom trees have no uniform degree");
}

std::string TreeSpec::descriptor() const {
  switch (kind) {
    case TreeKind::Regular: return "regular(" + std::to_string(degree) + ")";
    case TreeKind::Cayley: return "cayley(" + std::to_string(degree) + ")";
    case TreeKind::Custom: return "custom(" + std::to_string(edges.size() + 1) + ")";
  }
  return "unknown";
}

TreeSpec parse_edge_list(std::istream& in) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long u = -1, v = -1;
    std::string rest;
    if (!(fields >> u >> v) || (fields >> rest) || u < 0 || v < 0) {
      throw Error(ErrorCode::InvalidTree, "malformed edge on line " + std::to_string(line_no));
    }
    edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
  }
  if (edges.empty()) throw Error(ErrorCode::InvalidTree, "edge list is empty");
  return TreeSpec::custom(std::move(edges));
}

TreeSpec load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidTree, "cannot open edge list " + path);
  return parse_edge_list(in);
}

std::span<const Vertex> Tree::neighbors(Vertex v) const {
  return {adj_list_.data() + adj_begin_[v], adj_begin_[v + 1] - adj_begin_[v]};
}

std::span<const Vertex> Tree::children(Vertex v) const {
  return {child_list_.data() + child_begin_[v], child_begin_[v + 1] - child_begin_[v]};
}

std::pair<Vertex, std::size_t> Tree::level(int n) const {
  if (n < 0 || n > height()) return {vertex_count(), 0};
  return {level_begin_[n], level_begin_[n + 1] - level_begin_[n]};
}

void Tree::check_vertex(Vertex v) const {
  if (v >= vertex_count()) {
    throw Error(ErrorCode::InvalidVertex,
                "vertex " + std::to_string(v) + " not in tree of " + std::to_string(vertex_count()));
  }
}

void Tree::finalize() {
  const std::size_t n = parent_.size();
  // Breadth-first indexing: parent(v) < v and siblings are consecutive.
  child_begin_.assign(n + 1, 0);
  for (Vertex v = 1; v < n; ++v) ++child_begin_[parent_[v] + 1];
  for (std::size_t i = 0; i < n; ++i) child_begin_[i + 1] += child_begin_[i];
  child_list_.resize(n > 0 ? n - 1 : 0);
  for (Vertex v = 1; v < n; ++v) child_list_[v - 1] = v;

  adj_begin_.assign(n + 1, 0);
  adj_list_.clear();
  adj_list_.reserve(2 * (n - 1));
  for (Vertex v = 0; v < n; ++v) {
    adj_begin_[v] = adj_list_.size();
    if (v != 0) adj_list_.push_back(parent_[v]);
    for (Vertex c : children(v)) adj_list_.push_back(c);
  }
  adj_begin_[n] = adj_list_.size();

  level_begin_.clear();
  for (Vertex v = 0; v < n; ++v) {
    while (static_cast<int>(level_begin_.size()) <= depth_[v]) level_begin_.push_back(v);
  }
  level_begin_.push_back(n);

  tin_.assign(n, 0);
  tout_.assign(n, 0);
  std::size_t clock = 0;
  std::vector<std::pair<Vertex, std::size_t>> stack{{0, 0}};
  tin_[0] = clock++;
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto kids = children(v);
    if (next < kids.size()) {
      const Vertex c = kids[next++];
      tin_[c] = clock++;
      stack.emplace_back(c, 0);
    } else {
      tout_[v] = clock++;
      stack.pop_back();
    }
  }
}

std::vector<double> sphere_sizes(const TreeSpec& spec, int depth) {
  if (spec.kind == TreeKind::Custom) {
    const Tree t = build_tree(spec);
    std::vector<double> out(static_cast<std::size_t>(depth) + 1, 0.0);
    for (int n = 0; n <= depth && n <= t.height(); ++n) out[n] = static_cast<double>(t.level(n).second);
    return out;
  }
  const int q = spec.vertex_degree();
  std::vector<double> out(static_cast<std::size_t>(depth) + 1, 1.0);
  for (int n = 1; n <= depth; ++n) out[n] = (n == 1 ? q : out[n - 1] * (q - 1));
  return out;
}

namespace {

void validate_uniform(const TreeSpec& spec) {
  if (spec.kind == TreeKind::Regular && spec.degree < 2) {
    throw Error(ErrorCode::InvalidDegree, "regular degree must be >= 2, got " + std::to_string(spec.degree));
  }
  if (spec.kind == TreeKind::Cayley && spec.degree < 1) {
    throw Error(ErrorCode::InvalidDegree, "free-group rank must be >= 1, got " + std::to_string(spec.degree));
  }
  if (spec.depth < 0) throw Error(ErrorCode::InvalidArgument, "truncation depth must be >= 0");
}

}  // namespace

Tree build_tree(const TreeSpec& spec) {
  Tree t;
  t.spec_ = spec;
  if (spec.kind != TreeKind::Custom) {
    validate_uniform(spec);
    const auto spheres = sphere_sizes(spec, spec.depth);
    double total = 0.0;
    for (double s : spheres) total += s;
    if (total > static_cast<double>(spec.vertex_cap)) {
      throw Error(ErrorCode::DepthOverflow, spec.descriptor() + " at depth " + std::to_string(spec.depth) +
                                                " exceeds the vertex cap");
    }
    const auto n = static_cast<std::size_t>(total);
    const std::size_t q = static_cast<std::size_t>(spec.vertex_degree());
    t.parent_.reserve(n);
    t.depth_.reserve(n);
    t.parent_.push_back(kNoVertex);
    t.depth_.push_back(0);
    for (Vertex v = 0; v < t.parent_.size(); ++v) {
      if (t.depth_[v] >= spec.depth) continue;
      const std::size_t kids = v == 0 ? q : q - 1;
      for (std::size_t k = 0; k < kids; ++k) {
        t.parent_.push_back(v);
        t.depth_.push_back(t.depth_[v] + 1);
      }
    }
    t.source_.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.source_[i] = i;
    t.finalize();
    return t;
  }

  std::size_t n = 0;
  for (auto [u, v] : spec.edges) n = std::max({n, u + 1, v + 1});
  if (spec.edges.size() + 1 != n) {
    throw Error(ErrorCode::InvalidTree, std::to_string(spec.edges.size()) + " edges cannot span " +
                                            std::to_string(n) + " vertices");
  }
  if (n > spec.vertex_cap) throw Error(ErrorCode::DepthOverflow, "custom tree exceeds the vertex cap");
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [u, v] : spec.edges) {
    if (u == v) throw Error(ErrorCode::InvalidTree, "self-loop at vertex " + std::to_string(u));
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  const std::size_t src_root = spec.edges.front().first;
  std::vector<std::size_t> new_index(n, kNoVertex);
  new_index[src_root] = 0;
  t.source_.push_back(src_root);
  t.parent_.push_back(kNoVertex);
  t.depth_.push_back(0);
  for (std::size_t i = 0; i < t.source_.size(); ++i) {
    const std::size_t u = t.source_[i];
    for (std::size_t w : adj[u]) {
      if (i != 0 && w == t.source_[t.parent_[i]]) continue;
      if (new_index[w] != kNoVertex) throw Error(ErrorCode::InvalidTree, "cycle through vertex " + std::to_string(w));
      new_index[w] = t.source_.size();
      t.source_.push_back(w);
      t.parent_.push_back(i);
      t.depth_.push_back(t.depth_[i] + 1);
    }
  }
  if (t.source_.size() != n) throw Error(ErrorCode::InvalidTree, "edge list is not connected");
  t.spec_.depth = t.depth_.back();
  t.finalize();
  return t;
}

Vertex confluence_vertex(const Tree& tree, Vertex x, Vertex y) {
  tree.check_vertex(x);
  tree.check_vertex(y);
  while (tree.depth(x) > tree.depth(y)) x = tree.parent(x);
  while (tree.depth(y) > tree.depth(x)) y = tree.parent(y);
  while (x != y) {
    x = tree.parent(x);
    y = tree.parent(y);
  }
  return x;
}

PathInfo path_metrics(const Tree& tree, Vertex x, Vertex y) {
  PathInfo info;
  info.confluence = confluence_vertex(tree, x, y);
  info.confluence_depth = tree.depth(info.confluence);
  info.distance = tree.depth(x) + tree.depth(y) - 2 * info.confluence_depth;
  for (Vertex v = x; v != info.confluence; v = tree.parent(v)) info.segment.push_back(v);
  info.segment.push_back(info.confluence);
  const std::size_t up = info.segment.size();
  for (Vertex v = y; v != info.confluence; v = tree.parent(v)) info.segment.push_back(v);
  std::reverse(info.segment.begin() + static_cast<std::ptrdiff_t>(up), info.segment.end());
  return info;
}

std::optional<double> exact_growth_exponent(const TreeSpec& spec) {
  switch (spec.kind) {
    case TreeKind::Regular: return std::log(static_cast<double>(spec.degree - 1));
    case TreeKind::Cayley: return std::log(static_cast<double>(2 * spec.degree - 1));
    case TreeKind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

GrowthProfile growth_profile(const TreeSpec& spec, int n_max) {
  if (n_max < 2) throw Error(ErrorCode::InsufficientDepth, "growth profile needs n_max >= 2");
  if (spec.kind != TreeKind::Custom) validate_uniform(spec);
  GrowthProfile g;
  g.sphere = sphere_sizes(spec, n_max);
  g.ball.resize(g.sphere.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < g.sphere.size(); ++n) g.ball[n] = (acc += g.sphere[n]);
  std::vector<double> xs, ys;
  for (int n = n_max - n_max / 2; n <= n_max; ++n) {
    xs.push_back(n);
    ys.push_back(std::log(g.ball[n]));
  }
  g.delta_estimate = ols_slope(xs, ys);
  g.delta_exact = exact_growth_exponent(spec);
  return g;
}

double EdgeCoordinates::squared_norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.second * e.second;
  return s;
}

double dot(const EdgeCoordinates& a, const EdgeCoordinates& b) {
  double s = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

EdgeCoordinates operator-(const EdgeCoordinates& a, const EdgeCoordinates& b) {
  EdgeCoordinates out;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() || j != b.entries.end()) {
    if (j == b.entries.end() || (i != a.entries.end() && i->first < j->first)) {
      out.entries.push_back(*i++);
    } else if (i == a.entries.end() || j->first < i->first) {
      out.entries.emplace_back(j->first, -j->second);
      ++j;
    } else {
      const double v = i->second - j->second;
      if (v != 0.0) out.entries.emplace_back(i->first, v);
      ++i;
      ++j;
    }
  }
  return out;
}

EdgeCoordinates embed_coordinates(const Tree& tree, Vertex v) {
  tree.check_vertex(v);
  EdgeCoordinates c;
  for (Vertex u = v; u != tree.root(); u = tree.parent(u)) c.entries.emplace_back(u, 1.0);
  std::reverse(c.entries.begin(), c.entries.end());
  return c;
}

}  // namespace treephase

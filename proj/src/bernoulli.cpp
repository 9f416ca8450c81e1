#include "treephase/bernoulli.hpp"

#include <cmath>

#include "treephase/error.hpp"
#include "treephase/stats.hpp"

namespace treephase::bernoulli {

namespace {

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in (0,1)");
}

/// Edges of [x,y] with a flag telling whether the edge lies on the x side of
/// the confluence (so pointing toward x means pointing away from the root).
std::vector<std::pair<EdgeId, bool>> segment_edges(const Tree& tree, Vertex x, Vertex y) {
  const Vertex c = confluence_vertex(tree, x, y);
  std::vector<std::pair<EdgeId, bool>> edges;
  for (Vertex v = x; v != c; v = tree.parent(v)) edges.emplace_back(v, true);
  for (Vertex v = y; v != c; v = tree.parent(v)) edges.emplace_back(v, false);
  return edges;
}

}  // namespace

BernoulliParams BernoulliParams::make(double p) {
  check_p(p);
  BernoulliParams b;
  b.p = p;
  b.lambda = std::min((1.0 - p) / p, p / (1.0 - p));
  return b;
}

bool Orientation::points_toward(EdgeId e, Vertex x) const {
  // Edge e joins e and parent(e); x lies beyond the child end iff e is an ancestor of x.
  const bool x_below = tree->is_ancestor(e, x);
  return x_below ? !toward_root[e] : toward_root[e];
}

Orientation sample_orientation(const Tree& tree, Vertex x, double p, std::uint64_t seed) {
  check_p(p);
  tree.check_vertex(x);
  Orientation o;
  o.tree = &tree;
  o.center = x;
  o.p = p;
  o.seed = seed;
  o.toward_root.assign(tree.vertex_count(), false);
  Rng rng = make_stream(seed, 0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (EdgeId e = 1; e < tree.vertex_count(); ++e) {
    const bool toward_x = uniform(rng) < p;
    o.toward_root[e] = tree.is_ancestor(e, x) ? !toward_x : toward_x;
  }
  return o;
}

int cocycle(const Orientation& omega, Vertex x, Vertex y) {
  int c = 0;
  for (auto [e, x_side] : segment_edges(*omega.tree, x, y)) {
    // On the x side, "toward x" is away from the root; on the y side, toward it.
    const bool toward_x = x_side ? !omega.toward_root[e] : omega.toward_root[e];
    c += toward_x ? 1 : -1;
  }
  return c;
}

int rn_exponent(const Orientation& omega, Vertex x, Vertex y) { return -cocycle(omega, y, x); }

double rn_derivative(const Orientation& omega, Vertex x, Vertex y, double p) {
  check_p(p);
  return std::pow((1.0 - p) / p, rn_exponent(omega, x, y));
}

double hellinger_bernoulli_exact(const Tree& tree, Vertex x, Vertex y, double p) {
  check_p(p);
  const int d = path_metrics(tree, x, y).distance;
  return std::pow(2.0 * std::sqrt(p * (1.0 - p)), d);
}

HellingerEstimate hellinger_bernoulli_mc(const Tree& tree, Vertex x, Vertex y, double p, std::size_t trials,
                                         std::uint64_t seed, const Execution& exec) {
  check_p(p);
  if (trials < kMinHellingerTrials) {
    throw Error(ErrorCode::InsufficientTrials, "hellinger MC needs >= " + std::to_string(kMinHellingerTrials) +
                                                   " trials");
  }
  const int d = path_metrics(tree, x, y).distance;
  const double log_ratio = std::log((1.0 - p) / p);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<RunningStats> partial(blocks);
  parallel_for(blocks, exec, [&](std::size_t b) {
    Rng rng = make_stream(seed, b);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const std::size_t end = std::min(trials, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      // Under mu_x^p each segment edge points toward x with probability p;
      // c(y,x) counts toward-y minus toward-x.
      int c_yx = 0;
      for (int k = 0; k < d; ++k) c_yx += uniform(rng) < p ? -1 : 1;
      partial[b].add(std::exp(-0.5 * c_yx * log_ratio));
    }
  });
  RunningStats total;
  for (const auto& s : partial) total.merge(s);
  return {total.mean(), total.stderr_mean(), total.count()};
}

}  // namespace treephase::bernoulli

#pragma once

#include <cstdint>
#include <vector>

#include "treephase/parallel.hpp"
#include "treephase/tree.hpp"

namespace treephase::bernoulli {

struct BernoulliParams {
  double p = 0.5;
  double lambda = 1.0;  // min((1-p)/p, p/(1-p))

  static BernoulliParams make(double p);
  /// (1-p)/p, the base of the Radon-Nikodym derivative.
  double ratio() const { return (1.0 - p) / p; }
};

/// A random orientation of every edge of a truncated tree, stored relative to
/// the root: toward_root[e] is true iff edge e (child e -> parent) points at
/// the parent. The toward-x direction is recovered from path geometry.
struct Orientation {
  const Tree* tree = nullptr;
  std::vector<bool> toward_root;  // indexed by edge id; [0] unused
  Vertex center = 0;
  double p = 0.5;
  std::uint64_t seed = 0;

  /// True iff edge e points toward vertex x.
  bool points_toward(EdgeId e, Vertex x) const;
};

/// Sample from mu_x^p: independently, each edge points toward x with probability p.
Orientation sample_orientation(const Tree& tree, Vertex x, double p, std::uint64_t seed);

/// c(x,y)(omega): edges of [x,y] oriented toward x minus edges oriented toward y.
int cocycle(const Orientation& omega, Vertex x, Vertex y);

/// Integer k with (d mu_y^p / d mu_x^p)(omega) = ((1-p)/p)^k, i.e. k = -c(y,x).
int rn_exponent(const Orientation& omega, Vertex x, Vertex y);

/// (d mu_y^p / d mu_x^p)(omega) = ((1-p)/p)^{-c(y,x)}.
double rn_derivative(const Orientation& omega, Vertex x, Vertex y, double p);

struct HellingerEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t trials = 0;
};

/// (2 sqrt(p(1-p)))^{d(x,y)}.
double hellinger_bernoulli_exact(const Tree& tree, Vertex x, Vertex y, double p);

inline constexpr std::size_t kMinHellingerTrials = 1000;

/// Monte Carlo estimate of the integral of ((1-p)/p)^{-c(y,x)/2} under mu_x^p.
/// Only the edges of [x,y] are sampled; the integrand ignores all others.
HellingerEstimate hellinger_bernoulli_mc(const Tree& tree, Vertex x, Vertex y, double p, std::size_t trials,
                                         std::uint64_t seed, const Execution& exec = {});

}  // namespace treephase::bernoulli

#pragma once

#include <climits>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "treephase/error.hpp"
#include "treephase/parallel.hpp"
#include "treephase/tree.hpp"

namespace treephase::walks {

enum class IncrementKind { GaussianStd, BernoulliPM1, FiniteSupport };

/// Law of the i.i.d. edge increments X_e.
///
/// BernoulliPM1 follows the orientation cocycle convention at the root: -1
/// with probability p (edge oriented toward the root), +1 with probability
/// 1-p. `flip` exchanges the two values.
struct IncrementDistribution {
  IncrementKind kind = IncrementKind::GaussianStd;
  double p = 0.5;
  bool flip = false;
  std::vector<double> values;  // FiniteSupport only
  std::vector<double> probs;

  static IncrementDistribution gaussian();
  static IncrementDistribution bernoulli(double p, bool flip = false);
  static IncrementDistribution finite(std::vector<double> values, std::vector<double> probs);

  double mean() const;
  /// log E[exp(x X)] and its derivative in x.
  double log_mgf(double x) const;
  double log_mgf_derivative(double x) const;
  /// Smallest support point (-inf for the Gaussian).
  double support_min() const;
  /// P(X = support_min()), zero for the Gaussian.
  double mass_at_min() const;
  std::string descriptor() const;
};

/// Per-stream sampler; holds distribution state, so one per Rng.
class IncrementSampler {
 public:
  explicit IncrementSampler(const IncrementDistribution& dist);
  double operator()(Rng& rng);

 private:
  const IncrementDistribution* dist_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::vector<double> cumulative_;
};

/// Offspring structure of a rooted tree read level by level in breadth-first
/// order: uniform (regular / Cayley, never materialized) or a built Tree.
class Branching {
 public:
  static Branching from_spec(const TreeSpec& spec);
  explicit Branching(std::shared_ptr<const Tree> tree);

  std::size_t level_size(int n) const;
  std::size_t child_count(int n, std::size_t index) const;
  /// Deepest level available; INT_MAX for uniform trees.
  int max_depth() const;
  std::string descriptor() const { return descriptor_; }
  /// Throws DepthOverflow if level `n` would exceed the vertex cap.
  void check_depth(int n) const;

 private:
  Branching() = default;
  std::size_t root_children_ = 0;
  std::size_t interior_children_ = 0;
  std::shared_ptr<const Tree> tree_;
  std::size_t vertex_cap_ = kDefaultVertexCap;
  std::string descriptor_;
};

/// Samples S over levels 0..depth keeping only two levels resident. Calls
/// visit(n, S_level_n) for each level; stops early when visit returns false.
/// Increments are drawn parent by parent, child by child, i.e. in vertex index
/// order of the breadth-first tree.
template <class Visit>
void walk_levels(const Branching& branching, const IncrementDistribution& dist, int depth, Rng& rng,
                 Visit&& visit) {
  if (depth > branching.max_depth()) {
    throw Error(ErrorCode::DepthOverflow, "tree " + branching.descriptor() + " is shallower than depth " +
                                              std::to_string(depth));
  }
  branching.check_depth(depth);
  IncrementSampler draw(dist);
  std::vector<double> current{0.0}, next;
  if (!visit(0, std::span<const double>(current))) return;
  for (int n = 0; n < depth; ++n) {
    next.clear();
    next.reserve(branching.level_size(n + 1));
    for (std::size_t i = 0; i < current.size(); ++i) {
      const std::size_t kids = branching.child_count(n, i);
      for (std::size_t k = 0; k < kids; ++k) next.push_back(current[i] + draw(rng));
    }
    current.swap(next);
    if (!visit(n + 1, std::span<const double>(current))) return;
  }
}

/// One realization of the tree-indexed walk with full retention.
struct TreeWalkSample {
  const Tree* tree = nullptr;
  std::vector<double> increments;  // indexed by edge id (child vertex); [0] = 0
  std::vector<double> sums;        // S_v
  std::uint64_t seed = 0;
};

/// Uses stream 0 of `seed`, so it reproduces trial 0 of the level-by-level
/// estimators for the same seed.
TreeWalkSample sample_walk(const Tree& tree, const IncrementDistribution& dist, std::uint64_t seed);

/// m(y) = inf_{x <= 0} E[exp(x (X - y))]. Closed forms for Gaussian and
/// Bernoulli, golden-section search otherwise.
double eval_m(const IncrementDistribution& dist, double y);

enum class MinimizeMethod { GoldenSection, DerivativeRoot };

/// Numerical m(y) for any law, by golden-section search on the convex
/// exponent x -> log E[exp(x(X-y))] over x <= 0, or by bisection on its derivative.
double eval_m_numeric(const IncrementDistribution& dist, double y, MinimizeMethod method);

inline constexpr double kMaxAbsY = 1e6;
inline constexpr double kM1Tolerance = 1e-10;

/// m1(z) = sup{y | m(y) < z} by bisection to absolute tolerance 1e-10.
double eval_m1(const IncrementDistribution& dist, double z);

/// Closed-form inverse where available: -sqrt(-2 log z) for the Gaussian.
std::optional<double> m1_closed_form(const IncrementDistribution& dist, double z);

enum class ExtremeMode { Min, Max };

struct RaySpeedStats {
  ExtremeMode mode = ExtremeMode::Min;
  int depth = 0;
  std::size_t trials = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> per_trial;
};

/// Per trial, the extremum of S_v / n over the sphere |v| = n.
RaySpeedStats ray_speed_estimate(const TreeSpec& spec, const IncrementDistribution& dist, int depth,
                                 std::size_t trials, std::uint64_t seed, ExtremeMode mode,
                                 const Execution& exec = {});

/// Statistics of W_n = sum_{|v|=n} exp(s S_v) on regular(q) with Gaussian increments.
struct MartingaleReport {
  int q = 3;
  double s = 0.0;
  int depth = 0;
  std::size_t trials = 0;
  double ratio_mean = 0.0;      // mean of W_{n+1} / W_n
  double ratio_stderr = 0.0;
  double expected_ratio = 0.0;  // (q-1) exp(s^2/2)
  bool pass = false;
  /// M_n = exp(-n (s^2/2 + delta)) W_n. M_0 = W_0 = 1, but the root has q
  /// children rather than q-1, so E[M_n] = q/(q-1) for n >= 1.
  double normalized_mean = 0.0;
  double normalized_stderr = 0.0;
  double expected_normalized = 0.0;
};

MartingaleReport additive_martingale_check(int q, double s, int depth, std::size_t trials, std::uint64_t seed,
                                           const Execution& exec = {});

}  // namespace treephase::walks

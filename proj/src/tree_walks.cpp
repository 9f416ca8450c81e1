#include "treephase/tree_walks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treephase/stats.hpp"

namespace treephase::walks {

namespace {

/// (P(+1), P(-1)) of a Bernoulli law.
std::pair<double, double> bernoulli_masses(const IncrementDistribution& d) {
  return d.flip ? std::pair{d.p, 1.0 - d.p} : std::pair{1.0 - d.p, d.p};
}

void check_y(double y) {
  if (!std::isfinite(y) || std::abs(y) > kMaxAbsY) {
    throw Error(ErrorCode::NumericOverflow, "speed argument " + std::to_string(y) + " outside [-1e6, 1e6]");
  }
}

double sphere_extremum(std::span<const double> s, ExtremeMode mode) {
  return mode == ExtremeMode::Min ? *std::min_element(s.begin(), s.end()) : *std::max_element(s.begin(), s.end());
}

double scaled_log_sum_exp(std::span<const double> s, double scale) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : s) hi = std::max(hi, scale * v);
  double acc = 0.0;
  for (double v : s) acc += std::exp(scale * v - hi);
  return hi + std::log(acc);
}

}  // namespace

IncrementDistribution IncrementDistribution::gaussian() { return {}; }

IncrementDistribution IncrementDistribution::bernoulli(double p, bool flip) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "Bernoulli parameter must lie in (0,1)");
  IncrementDistribution d;
  d.kind = IncrementKind::BernoulliPM1;
  d.p = p;
  d.flip = flip;
  return d;
}

IncrementDistribution IncrementDistribution::finite(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) {
    throw Error(ErrorCode::InvalidArgument, "finite support needs matching nonempty values and probs");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-support probabilities must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "probabilities must sum to 1");
  IncrementDistribution d;
  d.kind = IncrementKind::FiniteSupport;
  d.values = std::move(values);
  d.probs = std::move(probs);
  return d;
}

double IncrementDistribution::mean() const {
  switch (kind) {
    case IncrementKind::GaussianStd: return 0.0;
    case IncrementKind::BernoulliPM1: {
      const auto [a, b] = bernoulli_masses(*this);
      return a - b;
    }
    case IncrementKind::FiniteSupport: {
      double m = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
      return m;
    }
  }
  return 0.0;
}

double IncrementDistribution::log_mgf(double x) const {
  switch (kind) {
    case IncrementKind::GaussianStd: return 0.5 * x * x;
    case IncrementKind::BernoulliPM1: {
      const auto [a, b] = bernoulli_masses(*this);
      return x >= 0.0 ? x + std::log(a + b * std::exp(-2.0 * x)) : -x + std::log(a * std::exp(2.0 * x) + b);
    }
    case IncrementKind::FiniteSupport: {
      std::vector<double> terms(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) terms[i] = std::log(probs[i]) + x * values[i];
      return log_sum_exp(terms);
    }
  }
  return 0.0;
}

double IncrementDistribution::log_mgf_derivative(double x) const {
  switch (kind) {
    case IncrementKind::GaussianStd: return x;
    case IncrementKind::BernoulliPM1: {
      const auto [a, b] = bernoulli_masses(*this);
      if (x >= 0.0) {
        const double e = b * std::exp(-2.0 * x);
        return (a - e) / (a + e);
      }
      const double e = a * std::exp(2.0 * x);
      return (e - b) / (e + b);
    }
    case IncrementKind::FiniteSupport: {
      const double lz = log_mgf(x);
      double d = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) d += values[i] * std::exp(std::log(probs[i]) + x * values[i] - lz);
      return d;
    }
  }
  return 0.0;
}

double IncrementDistribution::support_min() const {
  switch (kind) {
    case IncrementKind::GaussianStd: return -std::numeric_limits<double>::infinity();
    case IncrementKind::BernoulliPM1: return -1.0;
    case IncrementKind::FiniteSupport: return *std::min_element(values.begin(), values.end());
  }
  return 0.0;
}

double IncrementDistribution::mass_at_min() const {
  switch (kind) {
    case IncrementKind::GaussianStd: return 0.0;
    case IncrementKind::BernoulliPM1: return bernoulli_masses(*this).second;
    case IncrementKind::FiniteSupport: {
      const double lo = support_min();
      double m = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == lo) m += probs[i];
      }
      return m;
    }
  }
  return 0.0;
}

std::string IncrementDistribution::descriptor() const {
  switch (kind) {
    case IncrementKind::GaussianStd: return "gaussian";
    case IncrementKind::BernoulliPM1: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "bernoulli(%.17g%s)", p, flip ? ",flip" : "");
      return buf;
    }
    case IncrementKind::FiniteSupport: return "finite(" + std::to_string(values.size()) + ")";
  }
  return "unknown";
}

IncrementSampler::IncrementSampler(const IncrementDistribution& dist) : dist_(&dist) {
  if (dist.kind == IncrementKind::FiniteSupport) {
    cumulative_.resize(dist.probs.size());
    std::partial_sum(dist.probs.begin(), dist.probs.end(), cumulative_.begin());
    cumulative_.back() = 1.0;
  }
}

double IncrementSampler::operator()(Rng& rng) {
  switch (dist_->kind) {
    case IncrementKind::GaussianStd: return normal_(rng);
    case IncrementKind::BernoulliPM1: {
      const double toward_root = uniform_(rng) < dist_->p ? -1.0 : 1.0;
      return dist_->flip ? -toward_root : toward_root;
    }
    case IncrementKind::FiniteSupport: {
      const double u = uniform_(rng);
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      return dist_->values[static_cast<std::size_t>(std::min<std::ptrdiff_t>(
          it - cumulative_.begin(), static_cast<std::ptrdiff_t>(cumulative_.size()) - 1))];
    }
  }
  return 0.0;
}

Branching Branching::from_spec(const TreeSpec& spec) {
  if (spec.kind == TreeKind::Custom) return Branching(std::make_shared<const Tree>(build_tree(spec)));
  if ((spec.kind == TreeKind::Regular && spec.degree < 2) || (spec.kind == TreeKind::Cayley && spec.degree < 1)) {
    throw Error(ErrorCode::InvalidDegree, "invalid degree for " + spec.descriptor());
  }
  Branching b;
  b.root_children_ = static_cast<std::size_t>(spec.vertex_degree());
  b.interior_children_ = b.root_children_ - 1;
  b.vertex_cap_ = spec.vertex_cap;
  b.descriptor_ = spec.descriptor();
  return b;
}

Branching::Branching(std::shared_ptr<const Tree> tree)
    : tree_(std::move(tree)), vertex_cap_(tree_->spec().vertex_cap), descriptor_(tree_->spec().descriptor()) {}

std::size_t Branching::level_size(int n) const {
  if (tree_) return tree_->level(n).second;
  if (n == 0) return 1;
  double size = static_cast<double>(root_children_);
  for (int k = 1; k < n; ++k) {
    size *= static_cast<double>(interior_children_);
    if (size > static_cast<double>(vertex_cap_)) return vertex_cap_ + 1;
  }
  return static_cast<std::size_t>(size);
}

std::size_t Branching::child_count(int n, std::size_t index) const {
  if (tree_) return tree_->children(tree_->level(n).first + index).size();
  return n == 0 ? root_children_ : interior_children_;
}

int Branching::max_depth() const { return tree_ ? tree_->height() : INT_MAX; }

void Branching::check_depth(int n) const {
  if (level_size(n) > vertex_cap_) {
    throw Error(ErrorCode::DepthOverflow, descriptor_ + ": level " + std::to_string(n) + " exceeds the vertex cap");
  }
}

TreeWalkSample sample_walk(const Tree& tree, const IncrementDistribution& dist, std::uint64_t seed) {
  TreeWalkSample s;
  s.tree = &tree;
  s.seed = seed;
  s.increments.assign(tree.vertex_count(), 0.0);
  s.sums.assign(tree.vertex_count(), 0.0);
  Rng rng = make_stream(seed, 0);
  IncrementSampler draw(dist);
  for (Vertex v = 1; v < tree.vertex_count(); ++v) {
    s.increments[v] = draw(rng);
    s.sums[v] = s.sums[tree.parent(v)] + s.increments[v];
  }
  return s;
}

double eval_m_numeric(const IncrementDistribution& dist, double y, MinimizeMethod method) {
  check_y(y);
  if (dist.mean() <= y) return 1.0;
  if (y < dist.support_min()) return 0.0;
  if (y == dist.support_min()) return dist.mass_at_min();
  const auto h = [&](double x) { return dist.log_mgf(x) - x * y; };
  const auto dh = [&](double x) { return dist.log_mgf_derivative(x) - y; };
  // h is convex with h'(0) = mean - y > 0; bracket the minimizer in [-span, 0].
  double span = 1.0;
  while (dh(-span) > 0.0) {
    span *= 2.0;
    if (span > 1e8) return std::exp(h(-span));
  }
  double lo = -span, hi = 0.0;
  if (method == MinimizeMethod::DerivativeRoot) {
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, span); ++i) {
      const double mid = 0.5 * (lo + hi);
      (dh(mid) > 0.0 ? hi : lo) = mid;
    }
    return std::exp(h(0.5 * (lo + hi)));
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double ha = h(a), hb = h(b);
  for (int i = 0; i < 300 && hi - lo > 1e-12 * std::max(1.0, span); ++i) {
    if (ha < hb) {
      hi = b;
      b = a;
      hb = ha;
      a = hi - inv_phi * (hi - lo);
      ha = h(a);
    } else {
      lo = a;
      a = b;
      ha = hb;
      b = lo + inv_phi * (hi - lo);
      hb = h(b);
    }
  }
  return std::exp(std::min({h(lo), h(hi), ha, hb}));
}

double eval_m(const IncrementDistribution& dist, double y) {
  check_y(y);
  switch (dist.kind) {
    case IncrementKind::GaussianStd: return y <= 0.0 ? std::exp(-0.5 * y * y) : 1.0;
    case IncrementKind::BernoulliPM1: {
      const auto [a, b] = bernoulli_masses(dist);
      if (y >= a - b) return 1.0;
      if (y < -1.0) return 0.0;
      if (y == -1.0) return b;
      // exp(-KL) between the two-point law with mean y and the increment law.
      const double up = 0.5 * (1.0 + y);
      const double down = 0.5 * (1.0 - y);
      return std::exp(up * std::log(a / up) + down * std::log(b / down));
    }
    case IncrementKind::FiniteSupport: return eval_m_numeric(dist, y, MinimizeMethod::GoldenSection);
  }
  return 1.0;
}

double eval_m1(const IncrementDistribution& dist, double z) {
  if (!(z > 0.0 && z < 1.0)) throw Error(ErrorCode::OutOfDomain, "m1 needs z in (0,1)");
  // m is nondecreasing and equals 1 from the mean upward.
  double hi = dist.mean();
  double lo = hi - 1.0;
  while (eval_m(dist, lo) >= z) {
    lo = hi - 2.0 * (hi - lo);
    if (std::abs(lo) > kMaxAbsY) {
      throw Error(ErrorCode::BracketFailure, "m(y) stays >= z on the search range");
    }
  }
  while (hi - lo > kM1Tolerance) {
    const double mid = 0.5 * (lo + hi);
    (eval_m(dist, mid) < z ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<double> m1_closed_form(const IncrementDistribution& dist, double z) {
  if (dist.kind == IncrementKind::GaussianStd && z > 0.0 && z < 1.0) return -std::sqrt(-2.0 * std::log(z));
  return std::nullopt;
}

RaySpeedStats ray_speed_estimate(const TreeSpec& spec, const IncrementDistribution& dist, int depth,
                                 std::size_t trials, std::uint64_t seed, ExtremeMode mode, const Execution& exec) {
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  if (trials < 1) throw Error(ErrorCode::InsufficientTrials, "ray speed needs >= 1 trial");
  RaySpeedStats out;
  out.mode = mode;
  out.depth = depth;
  out.trials = trials;
  out.per_trial.assign(trials, 0.0);
  if (depth > 0) {
    const Branching branching = Branching::from_spec(spec);
    branching.check_depth(depth);
    parallel_for(trials, exec, [&](std::size_t t) {
      Rng rng = make_stream(seed, t);
      walk_levels(branching, dist, depth, rng, [&](int n, std::span<const double> s) {
        if (n == depth) out.per_trial[t] = sphere_extremum(s, mode) / depth;
        return true;
      });
    });
  }
  RunningStats stats;
  for (double v : out.per_trial) stats.add(v);
  out.mean = stats.mean();
  out.stderr_ = stats.stderr_mean();
  return out;
}

MartingaleReport additive_martingale_check(int q, double s, int depth, std::size_t trials, std::uint64_t seed,
                                           const Execution& exec) {
  if (q < 3) throw Error(ErrorCode::InvalidDegree, "additive martingale check needs q >= 3");
  if (depth < 2) throw Error(ErrorCode::InsufficientDepth, "additive martingale check needs n >= 2");
  if (trials < 2) throw Error(ErrorCode::InsufficientTrials, "additive martingale check needs >= 2 trials");
  const Branching branching = Branching::from_spec(TreeSpec::regular(q, depth + 1));
  branching.check_depth(depth + 1);
  const IncrementDistribution dist = IncrementDistribution::gaussian();
  const double delta = std::log(static_cast<double>(q - 1));
  std::vector<double> ratio(trials), normalized(trials);
  parallel_for(trials, exec, [&](std::size_t t) {
    Rng rng = make_stream(seed, t);
    double log_w_n = 0.0;
    walk_levels(branching, dist, depth + 1, rng, [&](int n, std::span<const double> sums) {
      if (n == depth) {
        log_w_n = scaled_log_sum_exp(sums, s);
        normalized[t] = std::exp(-depth * (0.5 * s * s + delta) + log_w_n);
      } else if (n == depth + 1) {
        ratio[t] = std::exp(scaled_log_sum_exp(sums, s) - log_w_n);
      }
      return true;
    });
  });
  RunningStats r, m;
  for (std::size_t t = 0; t < trials; ++t) {
    r.add(ratio[t]);
    m.add(normalized[t]);
  }
  MartingaleReport rep;
  rep.q = q;
  rep.s = s;
  rep.depth = depth;
  rep.trials = trials;
  rep.ratio_mean = r.mean();
  rep.ratio_stderr = r.stderr_mean();
  rep.expected_ratio = (q - 1) * std::exp(0.5 * s * s);
  rep.pass = std::abs(rep.ratio_mean - rep.expected_ratio) <= 4.0 * rep.ratio_stderr + 1e-9 * rep.expected_ratio;
  rep.normalized_mean = m.mean();
  rep.normalized_stderr = m.stderr_mean();
  rep.expected_normalized = static_cast<double>(q) / (q - 1);
  return rep;
}

}  // namespace treephase::walks

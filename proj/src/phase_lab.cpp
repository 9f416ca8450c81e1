#include "treephase/phase_lab.hpp"

#include <cmath>
#include <limits>

#include "treephase/error.hpp"
#include "treephase/stats.hpp"
#include "treephase/tree_walks.hpp"

namespace treephase::phase {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::InvalidDelta, "delta must be finite and > 0, got " + std::to_string(delta));
  }
}

bool on_threshold(double value, double threshold) {
  return std::abs(value - threshold) <= kCriticalRelTol * std::abs(threshold);
}

Regime dissipative_regime(bool proper, const char* row) {
  return {proper ? RegimeLabel::TypeI : RegimeLabel::TypeIIinf, 0.0, row};
}

}  // namespace

std::string to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::TypeII1: return "II_1";
    case RegimeLabel::TypeIII1: return "III_1";
    case RegimeLabel::TypeIIIlambda: return "III_lambda";
    case RegimeLabel::TypeI: return "I";
    case RegimeLabel::TypeIIinf: return "II_inf";
    case RegimeLabel::CriticalUnknown: return "critical_unknown";
  }
  return "unknown";
}

std::string to_string(Model model) { return model == Model::Gaussian ? "gaussian" : "bernoulli"; }

std::string to_string(SlopeClass c) {
  switch (c) {
    case SlopeClass::Recurrent: return "recurrent";
    case SlopeClass::Dissipative: return "dissipative";
    case SlopeClass::Uncertain: return "uncertain";
  }
  return "unknown";
}

CriticalSet critical_parameters(Model model, double delta) {
  check_delta(delta);
  CriticalSet c;
  c.model = model;
  c.delta = delta;
  if (model == Model::Gaussian) {
    c.t_diss = 2.0 * std::sqrt(2.0 * delta);
    c.t_lower = std::sqrt(2.0 * delta);
    c.t_amen_lower = 2.0 * std::sqrt(delta);
  } else {
    // 2 sqrt(p(1-p)) = e^{-delta}  <=>  p = (1 -+ sqrt(1 - e^{-2 delta})) / 2.
    const double root = std::sqrt(-std::expm1(-2.0 * delta));
    c.p_low = 0.5 * (1.0 - root);
    c.p_high = 0.5 * (1.0 + root);
  }
  return c;
}

Regime classify_gaussian(double t, double delta, bool proper) {
  check_delta(delta);
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "t must be finite and >= 0");
  const double t_diss = 2.0 * std::sqrt(2.0 * delta);
  if (t == 0.0) return {RegimeLabel::TypeII1, 0.0, "t = 0"};
  if (on_threshold(t, t_diss)) return {RegimeLabel::CriticalUnknown, 0.0, "t = 2 sqrt(2 delta)"};
  if (t < t_diss) return {RegimeLabel::TypeIII1, 0.0, "0 < t < 2 sqrt(2 delta)"};
  return dissipative_regime(proper, "t > 2 sqrt(2 delta)");
}

Regime classify_bernoulli(double p, double delta, bool proper) {
  check_delta(delta);
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in (0,1)");
  if (p == 0.5) return {RegimeLabel::TypeII1, 0.0, "p = 1/2"};
  const double affinity = 2.0 * std::sqrt(p * (1.0 - p));
  const double threshold = std::exp(-delta);
  if (on_threshold(affinity, threshold)) return {RegimeLabel::CriticalUnknown, 0.0, "2 sqrt(p(1-p)) = e^-delta"};
  if (affinity > threshold) {
    return {RegimeLabel::TypeIIIlambda, std::min((1.0 - p) / p, p / (1.0 - p)), "e^-delta < 2 sqrt(p(1-p)) < 1"};
  }
  return dissipative_regime(proper, "2 sqrt(p(1-p)) < e^-delta");
}

SlopeReport mc_growth_slope(const TreeSpec& spec, const SlopeWeights& weights, int depth, std::size_t trials,
                            std::uint64_t seed, const Execution& exec) {
  if (depth < 8) throw Error(ErrorCode::InsufficientDepth, "growth slope needs depth >= 8");
  if (trials < 8) throw Error(ErrorCode::InsufficientTrials, "growth slope needs >= 8 trials");
  const bool gaussian = weights.model == Model::Gaussian;
  if (!gaussian && !(weights.param > 0.0 && weights.param < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "Bernoulli weight parameter must lie in (0,1)");
  }
  const walks::Branching branching = walks::Branching::from_spec(spec);
  const walks::IncrementDistribution dist =
      gaussian ? walks::IncrementDistribution::gaussian() : walks::IncrementDistribution::bernoulli(weights.param);
  // log w_v = scale * S_v + offset * |v|.
  const double t = weights.param;
  const double scale = gaussian ? t : -std::log((1.0 - weights.param) / weights.param);
  const double offset = gaussian ? -0.5 * t * t : 0.0;

  const int first = depth - depth / 2;
  std::vector<double> xs;
  for (int n = first; n <= depth; ++n) xs.push_back(n);
  std::vector<std::vector<double>> log_mass(trials, std::vector<double>(static_cast<std::size_t>(depth) + 1));
  std::vector<double> slopes(trials);
  parallel_for(trials, exec, [&](std::size_t k) {
    Rng rng = make_stream(seed, k);
    auto& lm = log_mass[k];
    walks::walk_levels(branching, dist, depth, rng, [&](int n, std::span<const double> sums) {
      double hi = -std::numeric_limits<double>::infinity();
      for (double s : sums) hi = std::max(hi, scale * s);
      double acc = 0.0;
      for (double s : sums) acc += std::exp(scale * s - hi);
      lm[n] = hi + std::log(acc) + offset * n;
      return true;
    });
    slopes[k] = ols_slope(xs, std::span<const double>(lm).subspan(static_cast<std::size_t>(first)));
  });

  SlopeReport rep;
  rep.weights = weights;
  rep.depth = depth;
  rep.trials = trials;
  rep.seed = seed;
  rep.mean_log_mass.assign(static_cast<std::size_t>(depth) + 1, 0.0);
  RunningStats stats;
  for (std::size_t k = 0; k < trials; ++k) {
    stats.add(slopes[k]);
    for (int n = 0; n <= depth; ++n) rep.mean_log_mass[n] += log_mass[k][n] / static_cast<double>(trials);
  }
  rep.slope = stats.mean();
  rep.slope_stderr = stats.stderr_mean();
  rep.ci_lo = rep.slope - kSlopeSigmas * rep.slope_stderr;
  rep.ci_hi = rep.slope + kSlopeSigmas * rep.slope_stderr;
  rep.classification = rep.ci_lo > 0.0   ? SlopeClass::Recurrent
                       : rep.ci_hi < 0.0 ? SlopeClass::Dissipative
                                         : SlopeClass::Uncertain;
  return rep;
}

double slope_zero_crossing(const std::vector<SlopeReport>& sweep) {
  for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
    const double a = sweep[i].slope, b = sweep[i + 1].slope;
    if (a > 0.0 && b <= 0.0) {
      const double pa = sweep[i].weights.param, pb = sweep[i + 1].weights.param;
      return pa + (pb - pa) * a / (a - b);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

DirichletReport dirichlet_mass_estimate(const TreeSpec& spec, double t, int depth, std::size_t trials,
                                        std::uint64_t seed, const Execution& exec) {
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  if (trials < 1) throw Error(ErrorCode::InsufficientTrials, "dirichlet estimate needs >= 1 trial");
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "t must be finite and > 0");
  const walks::Branching branching = walks::Branching::from_spec(spec);
  const walks::IncrementDistribution dist = walks::IncrementDistribution::gaussian();
  const double half_t = 0.5 * t;
  // Deepest level through which the trial stayed inside the domain.
  std::vector<int> survived(trials, depth);
  parallel_for(trials, exec, [&](std::size_t k) {
    Rng rng = make_stream(seed, k);
    walks::walk_levels(branching, dist, depth, rng, [&](int n, std::span<const double> sums) {
      const double bound = half_t * n;
      for (double s : sums) {
        if (s > bound) {
          survived[k] = n - 1;
          return false;
        }
      }
      return true;
    });
  });
  DirichletReport rep;
  rep.t = t;
  rep.depth = depth;
  rep.trials = trials;
  rep.seed = seed;
  std::vector<std::size_t> alive(static_cast<std::size_t>(depth) + 1, 0);
  for (int last : survived) {
    for (int n = 0; n <= last; ++n) ++alive[n];
  }
  for (int n = 0; n <= depth; ++n) {
    const double p = static_cast<double>(alive[n]) / static_cast<double>(trials);
    rep.survival.push_back(p);
    rep.stderr_.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(trials)));
  }
  return rep;
}

SequenceRule SequenceRule::constant(double c) {
  return {"constant(" + std::to_string(c) + ")", [c](double) { return c; }};
}

SequenceRule SequenceRule::linear(double a) {
  return {"linear(" + std::to_string(a) + ")", [a](double n) { return a * n; }};
}

SequenceRule SequenceRule::power(double a, double b) {
  return {"power(" + std::to_string(a) + "," + std::to_string(b) + ")",
          [a, b](double n) { return a * std::pow(n, b); }};
}

SequenceRule SequenceRule::sqrt_log(double c) {
  return {"sqrt_log(" + std::to_string(c) + ")", [c](double n) { return std::sqrt(c * std::log(n + 2.0)); }};
}

SeriesClassification translation_series_classify(const SequenceRule& rule, double t, std::size_t n_terms,
                                                 double tolerance) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "t must be finite and > 0");
  if (n_terms < 16) throw Error(ErrorCode::InvalidArgument, "series test needs >= 16 terms");
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must lie in (0,1)");
  if (!rule.lambda) throw Error(ErrorCode::InvalidSequence, "sequence rule is empty");

  auto log_term = [&](std::size_t n) {
    const double lambda = rule.lambda(static_cast<double>(n));
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw Error(ErrorCode::InvalidSequence, rule.name + " gives lambda_" + std::to_string(n) + " = " +
                                                  std::to_string(lambda));
    }
    return -std::log(lambda) - t * t * lambda * lambda / 8.0;
  };

  SeriesClassification out;
  std::vector<double> logs(n_terms + 1, 0.0);
  double sum = 0.0, comp = 0.0;
  std::size_t checkpoint = 1;
  for (std::size_t n = 1; n <= n_terms; ++n) {
    logs[n] = log_term(n);
    const double term = std::exp(logs[n]);
    const double next = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
    sum = next;
    if (n == checkpoint || n == n_terms) {
      out.partial_sums.emplace_back(n, sum + comp);
      checkpoint *= 2;
    }
  }

  const std::size_t lo = n_terms / 2;
  const double log_last = logs[n_terms];
  const double big_n = static_cast<double>(n_terms);

  double max_log_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t n = lo; n < n_terms; ++n) max_log_ratio = std::max(max_log_ratio, logs[n + 1] - logs[n]);
  if (max_log_ratio <= std::log1p(-tolerance)) {
    const double r = std::exp(max_log_ratio);
    out.classification = SlopeClass::Dissipative;
    out.certificate = "geometric ratio <= " + std::to_string(r);
    out.tail_bound = std::exp(log_last) * r / (1.0 - r);
    return out;
  }

  constexpr int kSamples = 32;
  std::vector<std::size_t> probe;
  for (int j = 0; j <= kSamples; ++j) {
    const double x = std::log(static_cast<double>(lo)) + (std::log(big_n) - std::log(static_cast<double>(lo))) * j / kSamples;
    const auto n = static_cast<std::size_t>(std::llround(std::exp(x)));
    if (probe.empty() || n > probe.back()) probe.push_back(std::min(n, n_terms));
  }
  double min_exponent = std::numeric_limits<double>::infinity();
  bool bertrand_nondecreasing = true;
  double min_log_term = std::numeric_limits<double>::infinity();
  auto log_bertrand = [&](std::size_t n) {
    const double x = static_cast<double>(n);
    return logs[n] + std::log(x + 1.0) + std::log(std::log(x + 2.0));
  };
  for (std::size_t n = lo; n <= n_terms; ++n) min_log_term = std::min(min_log_term, logs[n]);
  for (std::size_t j = 0; j + 1 < probe.size(); ++j) {
    const double a = static_cast<double>(probe[j]), b = static_cast<double>(probe[j + 1]);
    min_exponent = std::min(min_exponent, -(logs[probe[j + 1]] - logs[probe[j]]) / (std::log(b) - std::log(a)));
    if (log_bertrand(probe[j + 1]) < log_bertrand(probe[j]) - 1e-12) bertrand_nondecreasing = false;
  }
  if (min_exponent >= 1.0 + tolerance) {
    out.classification = SlopeClass::Dissipative;
    out.certificate = "power tail, exponent >= " + std::to_string(min_exponent);
    out.tail_bound = std::exp(log_last) * big_n / (min_exponent - 1.0);
    return out;
  }
  if (min_log_term >= std::log(tolerance)) {
    out.classification = SlopeClass::Recurrent;
    out.certificate = "terms bounded below by " + std::to_string(std::exp(min_log_term));
    out.tail_bound = std::exp(log_last);
    return out;
  }
  if (bertrand_nondecreasing) {
    out.classification = SlopeClass::Recurrent;
    out.certificate = "a_n n log n nondecreasing (divergent minorant)";
    out.tail_bound = std::exp(log_last);
    return out;
  }
  out.classification = SlopeClass::Uncertain;
  out.certificate = "no comparison test certified";
  out.tail_bound = std::exp(log_last);
  return out;
}

}  // namespace treephase::phase

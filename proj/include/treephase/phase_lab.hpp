#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "treephase/parallel.hpp"
#include "treephase/tree.hpp"

namespace treephase::phase {

enum class RegimeLabel { TypeII1, TypeIII1, TypeIIIlambda, TypeI, TypeIIinf, CriticalUnknown };

std::string to_string(RegimeLabel label);

struct Regime {
  RegimeLabel label = RegimeLabel::CriticalUnknown;
  double lambda = 0.0;     // TypeIIIlambda only
  std::string provenance;  // table row that produced the label
};

enum class Model { Gaussian, Bernoulli };

std::string to_string(Model model);

struct CriticalSet {
  Model model = Model::Gaussian;
  double delta = 0.0;
  double t_diss = 0.0;        // Gaussian: 2 sqrt(2 delta)
  double t_lower = 0.0;       // Gaussian: sqrt(2 delta), the general lower bound on t_diss
  double t_amen_lower = 0.0;  // Gaussian: 2 sqrt(delta)
  double p_low = 0.0;         // Bernoulli: solutions of 2 sqrt(p(1-p)) = e^{-delta}
  double p_high = 0.0;
};

CriticalSet critical_parameters(Model model, double delta);

/// Relative tolerance under which a parameter counts as sitting on a threshold.
inline constexpr double kCriticalRelTol = 1e-12;

Regime classify_gaussian(double t, double delta, bool proper);
Regime classify_bernoulli(double p, double delta, bool proper);

enum class SlopeClass { Recurrent, Dissipative, Uncertain };

std::string to_string(SlopeClass c);

/// Per-vertex weights of the orbit series.
struct SlopeWeights {
  Model model = Model::Gaussian;
  double param = 0.0;  // t for Gaussian, p for Bernoulli

  static SlopeWeights gaussian(double t) { return {Model::Gaussian, t}; }
  static SlopeWeights bernoulli(double p) { return {Model::Bernoulli, p}; }
};

inline constexpr double kSlopeSigmas = 4.0;

struct SlopeReport {
  SlopeWeights weights;
  int depth = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> mean_log_mass;  // mean over trials of L_n = log sum_{|v|=n} w_v
  double slope = 0.0;                 // mean per-trial regression slope over the deepest half
  double slope_stderr = 0.0;
  double ci_lo = 0.0;  // slope -/+ 4 standard errors
  double ci_hi = 0.0;
  SlopeClass classification = SlopeClass::Uncertain;
};

/// Quenched growth of the orbit series. Gaussian: w_v = exp(-t^2|v|/2 + t S_v)
/// with standard Gaussian increments. Bernoulli: w_v = ((1-p)/p)^{-S_v} with
/// S_v = c(v, root) under mu_root^p. Positive slope means the series diverges
/// (recurrent), negative means it converges (dissipative).
SlopeReport mc_growth_slope(const TreeSpec& spec, const SlopeWeights& weights, int depth, std::size_t trials,
                            std::uint64_t seed, const Execution& exec = {});

/// Sign change of the mean slope along an ascending parameter grid, by linear
/// interpolation; NaN when the slope never turns from positive to negative.
double slope_zero_crossing(const std::vector<SlopeReport>& sweep);

struct DirichletReport {
  double t = 0.0;
  int depth = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> survival;  // P(S_v <= (t/2)|v| for all |v| <= n), n = 0..depth
  std::vector<double> stderr_;
};

DirichletReport dirichlet_mass_estimate(const TreeSpec& spec, double t, int depth, std::size_t trials,
                                        std::uint64_t seed, const Execution& exec = {});

/// Rule n -> lambda_n for n >= 1.
struct SequenceRule {
  std::string name;
  std::function<double(double)> lambda;

  static SequenceRule constant(double c);
  static SequenceRule linear(double a);            // a n
  static SequenceRule power(double a, double b);   // a n^b
  static SequenceRule sqrt_log(double c);          // sqrt(c log(n + 2))
};

struct SeriesClassification {
  SlopeClass classification = SlopeClass::Uncertain;
  std::string certificate;  // which comparison test fired
  std::vector<std::pair<std::size_t, double>> partial_sums;  // at log-spaced n
  double tail_bound = 0.0;  // bound on the remainder past n_terms (dissipative), else the last term
};

/// Decides convergence of sum_n (1/lambda_n) exp(-t^2 lambda_n^2 / 8) from its
/// closed-form terms on the tail window [n_terms/2, n_terms]:
///   ratio a_{n+1}/a_n <= 1 - tolerance                 -> Dissipative (geometric)
///   local exponent -dlog a/dlog n >= 1 + tolerance      -> Dissipative (p-series)
///   terms >= tolerance, or a_n n log n nondecreasing     -> Recurrent
/// and Uncertain otherwise.
SeriesClassification translation_series_classify(const SequenceRule& rule, double t, std::size_t n_terms,
                                                 double tolerance);

}  // namespace treephase::phase

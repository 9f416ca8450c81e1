#pragma once

#include <cstdint>
#include <vector>

#include "treephase/parallel.hpp"

namespace treephase::free_group {

/// p_{n,m} = P(|g_n| = m) for the canonical symmetric random walk on F_d.
/// Stored as a triangle, 0 <= m <= n <= n_max.
class WordLengthDistribution {
 public:
  int rank() const { return rank_; }
  int n_max() const { return n_max_; }
  double operator()(int n, int m) const;
  /// Probability mass flushed below 1e-300 while building row n.
  double mass_deficit(int n) const { return deficit_[n]; }

 private:
  friend WordLengthDistribution word_length_dp(int d, int n_max);
  int rank_ = 0;
  int n_max_ = 0;
  std::vector<double> table_;
  std::vector<double> deficit_;
};

/// The triangular table holds (n_max+1)(n_max+2)/2 doubles: about 400 MB at the cap.
inline constexpr int kMaxDpSteps = 10000;
inline constexpr double kFlushThreshold = 1e-300;

/// Birth-death chain on word length: 0 -> 1 surely; m >= 1 -> m+1 with
/// probability (2d-1)/(2d), m-1 with probability 1/(2d).
WordLengthDistribution word_length_dp(int d, int n_max);

/// lim E[exp(-s|g_n|)]^{1/n}:
///   ((2d-1) e^{-s} + e^{s}) / (2d)   for s <  log(2d-1)/2,
///   sqrt(2d-1)/d                      for s >= log(2d-1)/2.
double growth_rate_exact(int d, double s);

struct DpGrowth {
  double value = 0.0;          // (sum_m p_{n,m} e^{-sm})^{1/n}
  double cauchy_spread = 0.0;  // max |value(k) - value(n)| over same-parity k in [0.9n, n]
};

/// Finite-n estimate of the growth rate from the DP table at step n.
DpGrowth growth_rate_dp(const WordLengthDistribution& table, double s, int n);

/// Kesten's generating function B(x) = sum_n p_{n,0} x^n, evaluated in the
/// cancellation-free form (2d-1) / (sqrt(d^2 - (2d-1)x^2) + d - 1), which
/// equals (sqrt(d^2-(2d-1)x^2) - (d-1)) / (1-x^2) and extends through x = +-1.
double kesten_b(int d, double x);
double kesten_b_radius(int d);

/// Truncated series sum_{n <= n_max} p_{n,0} x^n from the DP table.
double kesten_b_series(const WordLengthDistribution& table, double x);

struct SpectralConstants {
  double rho = 0.0;           // sqrt(2d-1)/d
  double delta = 0.0;         // log(2d-1)
  double t_diss = 0.0;        // 2 sqrt(2 delta)
  double t_amen_lower = 0.0;  // 2 sqrt(delta)
  double b_radius = 0.0;      // d / sqrt(2d-1)
};

SpectralConstants spectral_constants(int d);

/// Spectral radius of the Gaussian action at scale t: f(t^2/8).
double gaussian_action_spectral_radius(int d, double t);

/// Empirical word-length histogram: `trials` walks of `steps` letters with
/// free reduction. Row n holds counts of |g_n| = m.
std::vector<std::vector<double>> sample_word_lengths(int d, int steps, std::size_t trials, std::uint64_t seed,
                                                     const Execution& exec = {});

}  // namespace treephase::free_group

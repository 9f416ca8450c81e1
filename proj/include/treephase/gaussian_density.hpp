#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treephase/parallel.hpp"

namespace treephase::gaussian {

/// Center of a Gaussian measure mu_x, in an orthonormal frame.
using AffinePoint = std::vector<double>;

/// log (d mu_y / d mu_x)(omega) = -1/2 |y-x|^2 + <omega - x, y - x>.
double log_rn_derivative(const AffinePoint& x, const AffinePoint& y, const std::vector<double>& omega);

/// Busemann-type affine function b(x,y)(z) = <z - (x+y)/2, y - x>, so that
/// d mu_x / d mu_y = exp(-b(x,y)).
double busemann(const AffinePoint& x, const AffinePoint& y, const std::vector<double>& z);

struct GaussianStats {
  double hellinger_affinity = 1.0;     // exp(-|y-x|^2 / 8)
  double hellinger_distance_sq = 0.0;  // 2 - 2 * affinity
  double relative_entropy = 0.0;       // H(mu_y | mu_x) = |y-x|^2 / 2
  bool log_affinity_bound_ok = true;   // -2 log affinity <= relative entropy
};

GaussianStats closed_form_stats(const AffinePoint& x, const AffinePoint& y);

struct VerificationEntry {
  std::string quantity;
  double estimate = 0.0;
  double closed_form = 0.0;
  double stderr_ = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<VerificationEntry> entries;  // affinity, mgf, relative_entropy
  double sigma_threshold = 4.0;
  bool pass() const;
  /// [{quantity, estimate, closed_form, stderr, trials, seed, pass}, ...]
  std::string to_json() const;
};

inline constexpr std::size_t kMinVerifyTrials = 10000;
inline constexpr std::size_t kVerifyBlock = 4096;

/// Monte Carlo check under omega ~ mu_x of
///   E[(d mu_y/d mu_x)^{1/2}] = exp(-|y-x|^2/8),
///   E[exp(z f(omega))]       = exp(z^2/2 + z f(x)),  f(w) = <w, f_direction>,
///   E[-log d mu_y/d mu_x]    = |y-x|^2/2.
/// Each estimate passes iff it lies within 4 standard errors of its closed form.
VerificationReport mc_verify(const AffinePoint& x, const AffinePoint& y, const std::vector<double>& f_direction,
                             double z, std::size_t trials, std::uint64_t seed, const Execution& exec = {});

}  // namespace treephase::gaussian

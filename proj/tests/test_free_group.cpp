#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "treephase/error.hpp"
#include "treephase/free_group.hpp"

using namespace treephase;
using namespace treephase::free_group;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::RuntimeFailure;
}

/// Reduced length of every word of n letters over F_d, by brute force.
std::map<int, double> enumerate_lengths(int d, int n) {
  const int letters = 2 * d;
  std::map<int, double> counts;
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= letters;
  for (long long code = 0; code < total; ++code) {
    std::vector<int> word;
    long long c = code;
    for (int i = 0; i < n; ++i) {
      const int a = static_cast<int>(c % letters);
      c /= letters;
      if (!word.empty() && (word.back() ^ 1) == a) {
        word.pop_back();
      } else {
        word.push_back(a);
      }
    }
    counts[static_cast<int>(word.size())] += 1.0 / static_cast<double>(total);
  }
  return counts;
}

}  // namespace

TEST_CASE("word-length table small cases") {
  const WordLengthDistribution w = word_length_dp(2, 50);
  CHECK(w(0, 0) == 1.0);
  CHECK(w(1, 1) == 1.0);
  CHECK(w(2, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(w(2, 2) == doctest::Approx(0.75).epsilon(1e-15));
  for (int n = 0; n <= 50; ++n) {
    double total = 0.0;
    for (int m = 0; m <= n; ++m) {
      total += w(n, m);
      if ((m - n) % 2 != 0) CHECK(w(n, m) == 0.0);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(w(n, n + 1) == 0.0);
  }
}

TEST_CASE("DP matches exhaustive word enumeration") {
  // 16 two-letter words for d = 2, and every word up to length 7 / 5.
  for (auto [d, n_max] : {std::pair{2, 7}, std::pair{3, 5}}) {
    const WordLengthDistribution w = word_length_dp(d, n_max);
    for (int n = 1; n <= n_max; ++n) {
      const auto counts = enumerate_lengths(d, n);
      for (int m = 0; m <= n; ++m) {
        const double expected = counts.count(m) ? counts.at(m) : 0.0;
        CHECK(w(n, m) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Monte Carlo free reduction reproduces the table") {
  const int steps = 12;
  const std::size_t trials = 200000;
  const auto hist = sample_word_lengths(2, steps, trials, 7);
  const WordLengthDistribution w = word_length_dp(2, steps);
  for (int n = 1; n <= steps; ++n) {
    for (int m = 0; m <= n; ++m) {
      const double p = w(n, m);
      const double freq = hist[n][m] / static_cast<double>(trials);
      CHECK(std::abs(freq - p) <= 4.0 * std::sqrt(p * (1.0 - p) / trials) + 1e-12);
    }
  }
  CHECK(sample_word_lengths(3, 6, 50, 1, {1}) == sample_word_lengths(3, 6, 50, 1, {4}));
}

TEST_CASE("growth rate closed form") {
  CHECK(growth_rate_exact(2, 0.0) == 1.0);
  for (double s : {0.5 * std::log(3.0), 0.6, 1.0, 5.0}) CHECK(growth_rate_exact(2, s) == std::sqrt(3.0) / 2.0);
  const WordLengthDistribution w = word_length_dp(2, 2000);
  CHECK(std::abs(growth_rate_dp(w, 0.3, 2000).value - growth_rate_exact(2, 0.3)) < 1e-3);
  CHECK(growth_rate_dp(w, 0.0, 2000).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(code_of([] { growth_rate_exact(2, -0.1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { growth_rate_dp(w, 0.1, 2001); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("dp error shrinks on a doubling schedule") {
  const WordLengthDistribution w = word_length_dp(2, 2048);
  for (double s : {0.1, 0.3, 0.5, 0.8, 1.2}) {
    double prev = HUGE_VAL;
    for (int n = 64; n <= 2048; n *= 2) {
      const double err = std::abs(growth_rate_dp(w, s, n).value - growth_rate_exact(2, s));
      CHECK(err <= prev);
      prev = err;
    }
  }
}

TEST_CASE("f is decreasing, log-convex and bounded below") {
  for (int d : {2, 3, 5}) {
    const double rho = std::sqrt(2.0 * d - 1.0) / d;
    const double kink = 0.5 * std::log(2.0 * d - 1.0);
    std::vector<double> logs;
    for (int i = 0; i < 100; ++i) {
      const double s = 2.0 * kink * i / 99.0;
      const double f = growth_rate_exact(d, s);
      logs.push_back(std::log(f));
      CHECK(f >= rho - 1e-15);
      CHECK(f >= std::exp(-s) - 1e-15);
      if (s < kink) {
        CHECK(f > rho);
      } else {
        CHECK(f == rho);
      }
    }
    for (std::size_t i = 1; i < logs.size(); ++i) CHECK(logs[i] <= logs[i - 1] + 1e-15);
    for (std::size_t i = 1; i + 1 < logs.size(); ++i) CHECK(logs[i + 1] - 2.0 * logs[i] + logs[i - 1] >= -1e-13);
  }
}

TEST_CASE("Kesten generating function") {
  CHECK(kesten_b(2, 0.0) == 1.0);
  CHECK(kesten_b(2, 0.5) == doctest::Approx((std::sqrt(3.25) - 1.0) / 0.75).epsilon(1e-14));
  CHECK(kesten_b(2, 0.5) == doctest::Approx(1.07037).epsilon(1e-5));
  CHECK(kesten_b_radius(2) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-15));
  // Through x = 1 the value is the limit of the rational form.
  const double k = 3.0;
  CHECK(kesten_b(2, 1.0) == doctest::Approx(k / (1.0 + 1.0)).epsilon(1e-15));
  const WordLengthDistribution w = word_length_dp(2, 2000);
  for (int i = 1; i <= 9; ++i) {
    const double x = 0.1 * i * kesten_b_radius(2);
    CHECK(std::abs(kesten_b_series(w, x) - kesten_b(2, x)) < 1e-6);
  }
  CHECK(code_of([] { kesten_b(2, 1.2); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("spectral constants") {
  const SpectralConstants c = spectral_constants(2);
  CHECK(c.rho == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
  CHECK(c.delta == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(c.t_diss == doctest::Approx(2.9645).epsilon(1e-4));
  CHECK(c.t_amen_lower < c.t_diss);
  for (int d = 2; d < 10; ++d) {
    const SpectralConstants e = spectral_constants(d);
    CHECK(e.rho > 0.0);
    CHECK(e.rho < 1.0);
    CHECK(e.t_amen_lower < e.t_diss);
  }
  CHECK(code_of([] { spectral_constants(1); }) == ErrorCode::RankTooSmall);
}

TEST_CASE("Gaussian action spectral radius") {
  CHECK(gaussian_action_spectral_radius(2, 0.0) == 1.0);
  const double plateau = 2.0 * std::sqrt(std::log(3.0));
  for (double t : {plateau, plateau + 0.1, 4.0}) {
    CHECK(gaussian_action_spectral_radius(2, t) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
  }
  CHECK(gaussian_action_spectral_radius(2, plateau - 0.1) > std::sqrt(3.0) / 2.0);
}

TEST_CASE("table limits") {
  CHECK(code_of([] { word_length_dp(2, kMaxDpSteps + 1); }) == ErrorCode::SizeOverflow);
  CHECK(code_of([] { word_length_dp(0, 10); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { word_length_dp(2, 0); }) == ErrorCode::InvalidArgument);
  // Far enough out, the tail underflows and the flushed mass is accounted for.
  const WordLengthDistribution w = word_length_dp(1, 3000);
  double total = w.mass_deficit(3000);
  for (int m = 0; m <= 3000; ++m) total += w(3000, m);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

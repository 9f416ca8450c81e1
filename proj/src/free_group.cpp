#include "treephase/free_group.hpp"

#include <cmath>

#include "treephase/error.hpp"

namespace treephase::free_group {

namespace {

std::size_t row_offset(int n) { return static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) + 1) / 2; }

void check_rank(int d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "free-group rank must be >= 1");
}

}  // namespace

double WordLengthDistribution::operator()(int n, int m) const {
  if (n < 0 || n > n_max_ || m < 0 || m > n) return 0.0;
  return table_[row_offset(n) + static_cast<std::size_t>(m)];
}

WordLengthDistribution word_length_dp(int d, int n_max) {
  check_rank(d);
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "word_length_dp needs n_max >= 1");
  if (n_max > kMaxDpSteps) {
    throw Error(ErrorCode::SizeOverflow, "word_length_dp limited to n_max <= " + std::to_string(kMaxDpSteps));
  }
  const double up = (2.0 * d - 1.0) / (2.0 * d);
  const double down = 1.0 / (2.0 * d);
  WordLengthDistribution w;
  w.rank_ = d;
  w.n_max_ = n_max;
  w.table_.assign(row_offset(n_max + 1), 0.0);
  w.deficit_.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  w.table_[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const double* prev = &w.table_[row_offset(n - 1)];
    double* row = &w.table_[row_offset(n)];
    double deficit = w.deficit_[n - 1];
    for (int m = 0; m <= n; ++m) {
      double v = 0.0;
      if (m == 1) v += prev[0];
      if (m >= 2) v += up * prev[m - 1];
      if (m + 1 <= n - 1) v += down * prev[m + 1];
      if (v != 0.0 && v < kFlushThreshold) {
        deficit += v;
        v = 0.0;
      }
      row[m] = v;
    }
    w.deficit_[n] = deficit;
  }
  return w;
}

double growth_rate_exact(int d, double s) {
  check_rank(d);
  if (s < 0.0) throw Error(ErrorCode::InvalidArgument, "growth rate needs s >= 0");
  const double k = 2.0 * d - 1.0;
  if (s < 0.5 * std::log(k)) return (k * std::exp(-s) + std::exp(s)) / (2.0 * d);
  return std::sqrt(k) / d;
}

namespace {

double dp_root(const WordLengthDistribution& table, double s, int n) {
  // Neumaier-compensated sum of p_{n,m} e^{-sm}.
  double sum = 0.0, comp = 0.0;
  for (int m = n % 2; m <= n; m += 2) {
    const double term = table(n, m) * std::exp(-s * m);
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return std::pow(sum + comp, 1.0 / n);
}

}  // namespace

DpGrowth growth_rate_dp(const WordLengthDistribution& table, double s, int n) {
  if (s < 0.0) throw Error(ErrorCode::InvalidArgument, "growth rate needs s >= 0");
  if (n < 1 || n > table.n_max()) throw Error(ErrorCode::InvalidArgument, "DP step outside the table");
  DpGrowth g;
  g.value = dp_root(table, s, n);
  for (int k = n - n / 10; k < n; ++k) {
    if ((n - k) % 2 != 0 || k < 1) continue;
    g.cauchy_spread = std::max(g.cauchy_spread, std::abs(dp_root(table, s, k) - g.value));
  }
  return g;
}

double kesten_b_radius(int d) {
  check_rank(d);
  return d / std::sqrt(2.0 * d - 1.0);
}

double kesten_b(int d, double x) {
  check_rank(d);
  if (!(std::abs(x) < kesten_b_radius(d))) {
    throw Error(ErrorCode::OutOfDomain, "|x| must be below the radius d/sqrt(2d-1)");
  }
  const double k = 2.0 * d - 1.0;
  return k / (std::sqrt(static_cast<double>(d) * d - k * x * x) + (d - 1.0));
}

double kesten_b_series(const WordLengthDistribution& table, double x) {
  double sum = 0.0, power = 1.0;
  for (int n = 0; n <= table.n_max(); ++n) {
    sum += table(n, 0) * power;
    power *= x;
  }
  return sum;
}

SpectralConstants spectral_constants(int d) {
  if (d < 2) throw Error(ErrorCode::RankTooSmall, "spectral constants need d >= 2 (F_1 is amenable)");
  const double k = 2.0 * d - 1.0;
  SpectralConstants c;
  c.rho = std::sqrt(k) / d;
  c.delta = std::log(k);
  c.t_diss = 2.0 * std::sqrt(2.0 * c.delta);
  c.t_amen_lower = 2.0 * std::sqrt(c.delta);
  c.b_radius = d / std::sqrt(k);
  return c;
}

double gaussian_action_spectral_radius(int d, double t) {
  if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "spectral radius needs t >= 0");
  return growth_rate_exact(d, t * t / 8.0);
}

std::vector<std::vector<double>> sample_word_lengths(int d, int steps, std::size_t trials, std::uint64_t seed,
                                                     const Execution& exec) {
  check_rank(d);
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
  std::vector<std::vector<int>> lengths(trials, std::vector<int>(static_cast<std::size_t>(steps) + 1, 0));
  parallel_for(trials, exec, [&](std::size_t t) {
    Rng rng = make_stream(seed, t);
    std::uniform_int_distribution<int> letter(0, 2 * d - 1);
    // Letter 2i is generator i, 2i+1 its inverse.
    std::vector<int> word;
    for (int n = 1; n <= steps; ++n) {
      const int a = letter(rng);
      if (!word.empty() && (word.back() ^ 1) == a) {
        word.pop_back();
      } else {
        word.push_back(a);
      }
      lengths[t][n] = static_cast<int>(word.size());
    }
  });
  std::vector<std::vector<double>> hist(static_cast<std::size_t>(steps) + 1);
  for (int n = 0; n <= steps; ++n) {
    hist[n].assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t t = 0; t < trials; ++t) hist[n][lengths[t][n]] += 1.0;
  }
  return hist;
}

}  // namespace treephase::free_group

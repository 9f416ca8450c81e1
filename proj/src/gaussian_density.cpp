#include "treephase/gaussian_density.hpp"

#include <cmath>
#include "json.hpp"

#include "treephase/error.hpp"
#include "treephase/stats.hpp"

namespace treephase::gaussian {

namespace {

void check_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b || a == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dimensions " + std::to_string(a) + " and " + std::to_string(b));
  }
}

double squared_gap(const AffinePoint& x, const AffinePoint& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (y[i] - x[i]) * (y[i] - x[i]);
  return s;
}

}  // namespace

double log_rn_derivative(const AffinePoint& x, const AffinePoint& y, const std::vector<double>& omega) {
  check_dims(x.size(), y.size(), "log_rn_derivative");
  check_dims(x.size(), omega.size(), "log_rn_derivative");
  double sq = 0.0, inner = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = y[i] - x[i];
    sq += h * h;
    inner += (omega[i] - x[i]) * h;
  }
  return -0.5 * sq + inner;
}

double busemann(const AffinePoint& x, const AffinePoint& y, const std::vector<double>& z) {
  check_dims(x.size(), y.size(), "busemann");
  check_dims(x.size(), z.size(), "busemann");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (z[i] - 0.5 * (x[i] + y[i])) * (y[i] - x[i]);
  return s;
}

GaussianStats closed_form_stats(const AffinePoint& x, const AffinePoint& y) {
  check_dims(x.size(), y.size(), "closed_form_stats");
  const double sq = squared_gap(x, y);
  GaussianStats s;
  s.hellinger_affinity = std::exp(-sq / 8.0);
  s.hellinger_distance_sq = 2.0 - 2.0 * s.hellinger_affinity;
  s.relative_entropy = 0.5 * sq;
  s.log_affinity_bound_ok = -2.0 * std::log(s.hellinger_affinity) <= s.relative_entropy;
  return s;
}

bool VerificationReport::pass() const {
  for (const auto& e : entries) {
    if (!e.pass) return false;
  }
  return !entries.empty();
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    arr.push_back({{"quantity", e.quantity},
                   {"estimate", e.estimate},
                   {"closed_form", e.closed_form},
                   {"stderr", e.stderr_},
                   {"trials", e.trials},
                   {"seed", e.seed},
                   {"pass", e.pass}});
  }
  return arr.dump(2);
}

VerificationReport mc_verify(const AffinePoint& x, const AffinePoint& y, const std::vector<double>& f_direction,
                             double z, std::size_t trials, std::uint64_t seed, const Execution& exec) {
  check_dims(x.size(), y.size(), "mc_verify");
  check_dims(x.size(), f_direction.size(), "mc_verify");
  if (trials < kMinVerifyTrials) {
    throw Error(ErrorCode::InsufficientTrials, "mc_verify needs >= " + std::to_string(kMinVerifyTrials) + " trials");
  }
  double fnorm = 0.0;
  for (double v : f_direction) fnorm += v * v;
  if (std::abs(std::sqrt(fnorm) - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "f_direction must have unit norm");
  }
  const std::size_t dim = x.size();
  const std::size_t blocks = (trials + kVerifyBlock - 1) / kVerifyBlock;
  struct Partial {
    RunningStats affinity, mgf, entropy;
  };
  std::vector<Partial> partial(blocks);
  parallel_for(blocks, exec, [&](std::size_t b) {
    Rng rng = make_stream(seed, b);
    std::normal_distribution<double> normal;
    const std::size_t begin = b * kVerifyBlock;
    const std::size_t end = std::min(trials, begin + kVerifyBlock);
    std::vector<double> omega(dim);
    Partial& p = partial[b];
    for (std::size_t i = begin; i < end; ++i) {
      double f_value = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        omega[k] = x[k] + normal(rng);
        f_value += omega[k] * f_direction[k];
      }
      const double log_rn = log_rn_derivative(x, y, omega);
      p.affinity.add(std::exp(0.5 * log_rn));
      p.mgf.add(std::exp(z * f_value));
      p.entropy.add(-log_rn);
    }
  });
  Partial total;
  for (const auto& p : partial) {
    total.affinity.merge(p.affinity);
    total.mgf.merge(p.mgf);
    total.entropy.merge(p.entropy);
  }
  const GaussianStats exact = closed_form_stats(x, y);
  double f_at_x = 0.0;
  for (std::size_t k = 0; k < dim; ++k) f_at_x += x[k] * f_direction[k];

  VerificationReport report;
  auto push = [&](const char* name, const RunningStats& s, double closed) {
    VerificationEntry e;
    e.quantity = name;
    e.estimate = s.mean();
    e.closed_form = closed;
    e.stderr_ = s.stderr_mean();
    e.trials = s.count();
    e.seed = seed;
    e.pass = std::abs(e.estimate - closed) <= report.sigma_threshold * e.stderr_ + 1e-12 * std::abs(closed);
    report.entries.push_back(e);
  };
  push("hellinger_affinity", total.affinity, exact.hellinger_affinity);
  push("mgf", total.mgf, std::exp(0.5 * z * z + z * f_at_x));
  push("relative_entropy", total.entropy, exact.relative_entropy);
  return report;
}

}  // namespace treephase::gaussian

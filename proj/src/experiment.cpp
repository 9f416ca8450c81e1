#include "treephase/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "treephase/bernoulli.hpp"
#include "treephase/error.hpp"
#include "treephase/free_group.hpp"
#include "treephase/gaussian_density.hpp"
#include "treephase/phase_lab.hpp"
#include "treephase/tree.hpp"
#include "treephase/tree_walks.hpp"

namespace treephase::cli {

namespace {

[[noreturn]] void schema(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, "key '" + key + "': " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

/// Typed, range-checked access to one JSON object; errors name the full key.
class View {
 public:
  View(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) schema(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string key(const std::string& k) const { return join(path_, k); }

  const Json& raw(const std::string& k) const {
    if (!has(k)) schema(key(k), "missing");
    return j_.at(k);
  }

  View sub(const std::string& k) const { return View(raw(k), key(k)); }

  double number(const std::string& k, std::optional<double> fallback = std::nullopt,
                double lo = -HUGE_VAL, double hi = HUGE_VAL) const {
    if (!has(k)) {
      if (fallback) return *fallback;
      schema(key(k), "missing");
    }
    const Json& v = j_.at(k);
    if (!v.is_number()) schema(key(k), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi) {
      schema(key(k), "value " + fmt(x) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
    }
    return x;
  }

  long long integer(const std::string& k, std::optional<long long> fallback = std::nullopt, long long lo = 0,
                    long long hi = (1LL << 40)) const {
    if (!has(k)) {
      if (fallback) return *fallback;
      schema(key(k), "missing");
    }
    const Json& v = j_.at(k);
    if (!v.is_number_integer()) schema(key(k), "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) {
      schema(key(k), "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
    }
    return x;
  }

  std::string text(const std::string& k, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(k)) {
      if (fallback) return *fallback;
      schema(key(k), "missing");
    }
    const Json& v = j_.at(k);
    if (!v.is_string()) schema(key(k), "expected a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& k, bool fallback) const {
    if (!has(k)) return fallback;
    if (!j_.at(k).is_boolean()) schema(key(k), "expected true or false");
    return j_.at(k).get<bool>();
  }

  std::vector<double> numbers(const std::string& k) const {
    const Json& v = raw(k);
    if (!v.is_array()) schema(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (const Json& x : v) {
      if (!x.is_number()) schema(key(k), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  /// Either an ascending array, or {"start", "stop", "step"} expanded as
  /// start + i*step while it stays below stop (plus rounding slack).
  std::vector<double> grid(const std::string& k) const {
    const Json& v = raw(k);
    std::vector<double> out;
    if (v.is_array()) {
      out = numbers(k);
      for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i] > out[i - 1])) schema(key(k), "grid must be strictly ascending");
      }
    } else {
      const View g = sub(k);
      const double start = g.number("start");
      const double stop = g.number("stop");
      const double step = g.number("step", std::nullopt, 1e-12);
      if (stop >= start) {
        const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
        if (count > 100000) schema(key(k), "grid has more than 100000 points");
        for (long long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
      }
    }
    if (out.empty()) throw Error(ErrorCode::EmptyGrid, "key '" + key(k) + "': grid is empty");
    return out;
  }

  static std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
  }

 private:
  const Json& j_;
  std::string path_;
};

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
  } visit;
  return std::visit(visit, c);
}

Json json_field(const Cell& c) {
  struct {
    Json operator()(std::monostate) const { return nullptr; }
    Json operator()(std::int64_t v) const { return v; }
    Json operator()(std::uint64_t v) const { return v; }
    Json operator()(double v) const {
      if (std::isfinite(v)) return v;
      return format_double(v);
    }
    Json operator()(const std::string& s) const { return s; }
  } visit;
  return std::visit(visit, c);
}

Cell count(std::size_t n) { return static_cast<std::uint64_t>(n); }
Cell integer(long long n) { return static_cast<std::int64_t>(n); }

struct Context {
  const ExperimentConfig& config;
  View root;
  Execution exec;
  Table table;
  std::string dist;  // increment law of the rows being written

  explicit Context(const ExperimentConfig& c) : config(c), root(c.document, ""), exec{c.threads} {
    table.columns = kLongColumns;
    table.extras["experiment"] = c.kind;
  }

  void row(const std::string& spec, Cell param, Cell n, Cell trials, const std::string& statistic, double value,
           Cell stderr_ = {}, std::string label = {}) {
    table.rows.push_back({spec, dist, std::move(n), std::move(trials), config.seed, statistic, value,
                          std::move(stderr_), std::move(param), std::move(label)});
  }
};

TreeSpec tree_from(const View& root, const std::string& base_dir, int depth) {
  if (!root.has("tree")) return TreeSpec::regular(3, depth);
  const View t = root.sub("tree");
  const std::string kind = t.text("kind");
  if (kind == "regular") return TreeSpec::regular(static_cast<int>(t.integer("degree", std::nullopt, 2, 1 << 20)), depth);
  if (kind == "cayley") return TreeSpec::cayley(static_cast<int>(t.integer("degree", std::nullopt, 1, 1 << 19)), depth);
  if (kind == "custom") {
    std::filesystem::path file = t.text("edges_file");
    if (file.is_relative()) file = std::filesystem::path(base_dir) / file;
    if (!std::filesystem::exists(file)) {
      throw Error(ErrorCode::ConfigNotFound, "key '" + t.key("edges_file") + "': config not found: " + file.string());
    }
    return load_edge_list(file.string());
  }
  schema(t.key("kind"), "expected regular, cayley or custom, got '" + kind + "'");
}

walks::IncrementDistribution increments_from(const View& root) {
  if (!root.has("increments")) return walks::IncrementDistribution::gaussian();
  const View inc = root.sub("increments");
  const std::string kind = inc.text("kind");
  if (kind == "gaussian") return walks::IncrementDistribution::gaussian();
  if (kind == "bernoulli") {
    return walks::IncrementDistribution::bernoulli(inc.number("p", std::nullopt, 1e-12, 1.0 - 1e-12),
                                                   inc.flag("flip", false));
  }
  if (kind == "finite") return walks::IncrementDistribution::finite(inc.numbers("values"), inc.numbers("probs"));
  schema(inc.key("kind"), "expected gaussian, bernoulli or finite, got '" + kind + "'");
}

phase::Model model_from(const View& root) {
  const std::string m = root.text("model");
  if (m == "gaussian") return phase::Model::Gaussian;
  if (m == "bernoulli") return phase::Model::Bernoulli;
  schema(root.key("model"), "expected gaussian or bernoulli, got '" + m + "'");
}

int depth_of(const View& root, const char* key = "depth", long long lo = 0) {
  return static_cast<int>(root.integer(key, std::nullopt, lo, 4096));
}

std::size_t trials_of(const View& root, long long lo = 1) {
  return static_cast<std::size_t>(root.integer("trials", std::nullopt, lo, 1LL << 32));
}

double delta_for(const View& root, const TreeSpec& spec) {
  if (root.has("delta")) return root.number("delta", std::nullopt, 1e-300);
  if (auto exact = exact_growth_exponent(spec)) return *exact;
  schema(root.key("delta"), "required when the tree has no exact exponent");
}

void run_growth_profile(Context& ctx) {
  const int n_max = depth_of(ctx.root, "n_max", 2);
  const TreeSpec spec = tree_from(ctx.root, ctx.config.base_dir, n_max);
  const GrowthProfile g = growth_profile(spec, n_max);
  const std::string s = spec.descriptor();
  for (std::size_t n = 0; n < g.sphere.size(); ++n) {
    ctx.row(s, {}, count(n), {}, "sphere", g.sphere[n]);
    ctx.row(s, {}, count(n), {}, "ball", g.ball[n]);
  }
  ctx.row(s, {}, integer(n_max), {}, "delta_estimate", g.delta_estimate);
  if (g.delta_exact) ctx.row(s, {}, integer(n_max), {}, "delta_exact", *g.delta_exact);
}

void run_speed(Context& ctx) {
  const int depth = depth_of(ctx.root);
  const std::size_t trials = trials_of(ctx.root);
  const TreeSpec spec = tree_from(ctx.root, ctx.config.base_dir, depth);
  const walks::IncrementDistribution dist = increments_from(ctx.root);
  const std::string mode = ctx.root.text("mode", "min");
  if (mode != "min" && mode != "max") schema(ctx.root.key("mode"), "expected min or max");
  const auto extreme = mode == "min" ? walks::ExtremeMode::Min : walks::ExtremeMode::Max;
  const std::string s = spec.descriptor();
  ctx.dist = dist.descriptor();

  const walks::RaySpeedStats r =
      walks::ray_speed_estimate(spec, dist, depth, trials, ctx.config.seed, extreme, ctx.exec);
  ctx.row(s, {}, integer(depth), count(trials), "ray_speed_" + mode, r.mean, r.stderr_);

  double z = 0.0;
  if (ctx.root.has("z")) {
    z = ctx.root.number("z", std::nullopt, 0.0, 1.0);
  } else {
    z = std::exp(-delta_for(ctx.root, spec));
  }
  ctx.row(s, z, {}, {}, "m1", walks::eval_m1(dist, z));
  if (auto closed = walks::m1_closed_form(dist, z)) ctx.row(s, z, {}, {}, "m1_closed_form", *closed);

  if (ctx.root.has("martingale")) {
    const View m = ctx.root.sub("martingale");
    const int q = static_cast<int>(m.integer("degree", 3, 3, 1 << 20));
    const double sv = m.number("s");
    const std::size_t mt = static_cast<std::size_t>(m.integer("trials", std::nullopt, 2, 1LL << 32));
    const std::string ms = TreeSpec::regular(q, 0).descriptor();
    ctx.dist = walks::IncrementDistribution::gaussian().descriptor();
    for (double nd : m.grid("depths")) {
      const int n = static_cast<int>(nd);
      if (n != nd) schema(m.key("depths"), "depths must be integers");
      const walks::MartingaleReport rep = walks::additive_martingale_check(q, sv, n, mt, ctx.config.seed, ctx.exec);
      ctx.row(ms, sv, integer(n), count(mt), "martingale_ratio", rep.ratio_mean, rep.ratio_stderr,
              rep.pass ? "pass" : "fail");
      ctx.row(ms, sv, integer(n), {}, "martingale_ratio_expected", rep.expected_ratio);
      ctx.row(ms, sv, integer(n), count(mt), "normalized_mean", rep.normalized_mean, rep.normalized_stderr);
      ctx.row(ms, sv, integer(n), {}, "normalized_expected", rep.expected_normalized);
    }
  }
}

phase::SlopeWeights weights_for(phase::Model model, double param) {
  return model == phase::Model::Gaussian ? phase::SlopeWeights::gaussian(param) : phase::SlopeWeights::bernoulli(param);
}

std::vector<Cell> slope_cells(const phase::SlopeReport& r, const std::string& spec) {
  return {phase::to_string(r.weights.model), spec, r.weights.param, integer(r.depth), count(r.trials), r.seed,
          r.slope, r.ci_lo, r.ci_hi, phase::to_string(r.classification)};
}

void run_slope_sweep(Context& ctx) {
  const int depth = depth_of(ctx.root, "depth", 8);
  const std::size_t trials = trials_of(ctx.root, 8);
  const TreeSpec spec = tree_from(ctx.root, ctx.config.base_dir, depth);
  const phase::Model model = model_from(ctx.root);
  const std::vector<double> grid = ctx.root.grid("grid");
  const std::string s = spec.descriptor();
  ctx.table.columns = kSlopeColumns;
  std::vector<phase::SlopeReport> sweep;
  for (double param : grid) {
    sweep.push_back(phase::mc_growth_slope(spec, weights_for(model, param), depth, trials, ctx.config.seed, ctx.exec));
    ctx.table.rows.push_back(slope_cells(sweep.back(), s));
  }
  const double crossing = phase::slope_zero_crossing(sweep);
  ctx.table.extras["zero_crossing"] = json_field(crossing);
  if (auto exact = exact_growth_exponent(spec)) {
    const phase::CriticalSet c = phase::critical_parameters(model, *exact);
    if (model == phase::Model::Gaussian) {
      ctx.table.extras["critical"] = {{"t_diss", c.t_diss}};
    } else {
      ctx.table.extras["critical"] = {{"p_low", c.p_low}, {"p_high", c.p_high}};
    }
  }
}

void run_dirichlet(Context& ctx) {
  const int depth = depth_of(ctx.root);
  const std::size_t trials = trials_of(ctx.root);
  const TreeSpec spec = tree_from(ctx.root, ctx.config.base_dir, depth);
  const std::vector<double> ts = ctx.root.has("grid") ? ctx.root.grid("grid")
                                                        : std::vector<double>{ctx.root.number("t", std::nullopt, 1e-300)};
  ctx.dist = walks::IncrementDistribution::gaussian().descriptor();
  for (double t : ts) {
    const phase::DirichletReport r = phase::dirichlet_mass_estimate(spec, t, depth, trials, ctx.config.seed, ctx.exec);
    for (std::size_t n = 0; n < r.survival.size(); ++n) {
      ctx.row(spec.descriptor(), t, count(n), count(trials), "survival", r.survival[n], r.stderr_[n]);
    }
  }
}

void run_spectra(Context& ctx) {
  const int d = static_cast<int>(ctx.root.integer("d", std::nullopt, 1, 1 << 20));
  const int dp_n = static_cast<int>(ctx.root.integer("dp_n", 2000, 2, free_group::kMaxDpSteps));
  const free_group::WordLengthDistribution table = free_group::word_length_dp(d, dp_n);
  ctx.table.columns = kSpectraColumns;
  auto row = [&](double axis, double exact, double dp_value, const char* curve, Cell spread) {
    ctx.table.rows.push_back({integer(d), axis, exact, integer(dp_n), dp_value, std::string(curve), std::move(spread)});
  };
  if (d >= 2) {
    const free_group::SpectralConstants c = free_group::spectral_constants(d);
    ctx.table.extras["constants"] = {{"rho", c.rho},           {"delta", c.delta},      {"t_diss", c.t_diss},
                                     {"t_amen_lower", c.t_amen_lower}, {"b_radius", c.b_radius}};
  }
  for (double s : ctx.root.grid("grid")) {
    if (s < 0.0) schema(ctx.root.key("grid"), "s must be >= 0");
    const free_group::DpGrowth g = free_group::growth_rate_dp(table, s, dp_n);
    row(s, free_group::growth_rate_exact(d, s), g.value, "growth_rate", g.cauchy_spread);
  }
  if (ctx.root.has("t_grid")) {
    for (double t : ctx.root.grid("t_grid")) {
      if (t < 0.0) schema(ctx.root.key("t_grid"), "t must be >= 0");
      const free_group::DpGrowth g = free_group::growth_rate_dp(table, t * t / 8.0, dp_n);
      row(t, free_group::gaussian_action_spectral_radius(d, t), g.value, "spectral_radius", g.cauchy_spread);
    }
  }
  if (ctx.root.has("kesten")) {
    const double radius = free_group::kesten_b_radius(d);
    for (double frac : ctx.root.grid("kesten")) {
      if (!(std::abs(frac) < 1.0)) schema(ctx.root.key("kesten"), "fractions of the radius must lie in (-1, 1)");
      const double x = frac * radius;
      row(x, free_group::kesten_b(d, x), free_group::kesten_b_series(table, x), "kesten_b", {});
    }
  }
}

void run_bernoulli_sweep(Context& ctx) {
  const int distance = depth_of(ctx.root, "distance", 1);
  const std::size_t trials = static_cast<std::size_t>(
      ctx.root.integer("trials", std::nullopt, static_cast<long long>(bernoulli::kMinHellingerTrials), 1LL << 32));
  const TreeSpec spec = tree_from(ctx.root, ctx.config.base_dir, distance);
  const Tree tree = build_tree(spec);
  if (tree.height() < distance) schema(ctx.root.key("distance"), "exceeds the tree height");
  const Vertex x = tree.root();
  const Vertex y = tree.level(distance).first;
  const bool proper = ctx.root.flag("proper", true);
  std::optional<double> delta;
  if (ctx.root.has("delta") || exact_growth_exponent(spec)) delta = delta_for(ctx.root, spec);
  const std::string s = spec.descriptor();
  ctx.dist = "orientation";
  for (double p : ctx.root.grid("grid")) {
    if (!(p > 0.0 && p < 1.0)) schema(ctx.root.key("grid"), "p must lie in (0, 1)");
    const bernoulli::HellingerEstimate mc =
        bernoulli::hellinger_bernoulli_mc(tree, x, y, p, trials, ctx.config.seed, ctx.exec);
    std::string label;
    if (delta) label = phase::to_string(phase::classify_bernoulli(p, *delta, proper).label);
    ctx.row(s, p, integer(distance), {}, "hellinger_exact", bernoulli::hellinger_bernoulli_exact(tree, x, y, p), {},
            label);
    ctx.row(s, p, integer(distance), count(trials), "hellinger_mc", mc.value, mc.stderr_, label);
    ctx.row(s, p, {}, {}, "lambda", bernoulli::BernoulliParams::make(p).lambda, {}, label);
  }
}

phase::SequenceRule rule_from(const View& root) {
  const View r = root.sub("rule");
  const std::string kind = r.text("kind");
  if (kind == "constant") return phase::SequenceRule::constant(r.number("c", std::nullopt, 1e-300));
  if (kind == "linear") return phase::SequenceRule::linear(r.number("a", std::nullopt, 1e-300));
  if (kind == "power") return phase::SequenceRule::power(r.number("a", std::nullopt, 1e-300), r.number("b"));
  if (kind == "sqrt_log") return phase::SequenceRule::sqrt_log(r.number("c", std::nullopt, 1e-300));
  schema(r.key("kind"), "expected constant, linear, power or sqrt_log, got '" + kind + "'");
}

void run_translation(Context& ctx) {
  const phase::SequenceRule rule = rule_from(ctx.root);
  const auto n_terms = static_cast<std::size_t>(ctx.root.integer("n_terms", 1 << 20, 16, 1LL << 28));
  const double tolerance = ctx.root.number("tolerance", 0.05, 1e-12, 1.0 - 1e-12);
  Json certificates = Json::array();
  for (double t : ctx.root.grid("grid")) {
    const phase::SeriesClassification c = phase::translation_series_classify(rule, t, n_terms, tolerance);
    const std::string label = phase::to_string(c.classification);
    for (const auto& [n, sum] : c.partial_sums) ctx.row(rule.name, t, count(n), {}, "partial_sum", sum, {}, label);
    ctx.row(rule.name, t, count(n_terms), {}, "tail_bound", c.tail_bound, {}, label);
    certificates.push_back({{"t", t}, {"classification", label}, {"certificate", c.certificate}});
  }
  ctx.table.extras["certificates"] = certificates;
}

void run_verify_gaussian(Context& ctx) {
  const std::vector<double> x = ctx.root.numbers("x");
  const std::vector<double> y = ctx.root.numbers("y");
  const std::vector<double> f = ctx.root.numbers("f_direction");
  const double z = ctx.root.number("z", 1.0);
  const std::size_t trials = static_cast<std::size_t>(
      ctx.root.integer("trials", std::nullopt, static_cast<long long>(gaussian::kMinVerifyTrials), 1LL << 34));
  const gaussian::VerificationReport rep = gaussian::mc_verify(x, y, f, z, trials, ctx.config.seed, ctx.exec);
  const std::string s = "dim(" + std::to_string(x.size()) + ")";
  ctx.dist = "gaussian";
  for (const auto& e : rep.entries) {
    ctx.row(s, z, {}, count(e.trials), e.quantity, e.estimate, e.stderr_, e.pass ? "pass" : "fail");
    ctx.row(s, z, {}, {}, e.quantity + "_closed_form", e.closed_form);
  }
  ctx.table.extras["pass"] = rep.pass();
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::hash() const {
  Json canon = document;
  canon.erase("threads");
  canon.erase("output");
  canon["seed"] = seed;
  return fnv1a_hex(canon.dump());
}

ExperimentConfig parse_config(std::string_view text, std::string base_dir, bool require_kind) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("key '<root>': not valid JSON (") + e.what() + ")");
  }
  const View root(doc, "");
  ExperimentConfig c;
  if (require_kind || root.has("experiment")) {
    c.kind = root.text("experiment");
    if (require_kind && std::find(kExperimentKinds.begin(), kExperimentKinds.end(), c.kind) == kExperimentKinds.end()) {
      schema("experiment", "unknown experiment '" + c.kind + "'");
    }
  }
  if (!root.has("seed")) schema("seed", "missing (a seed is mandatory)");
  const Json& seed = doc.at("seed");
  if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<long long>() < 0)) {
    schema("seed", "expected a non-negative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  c.threads = static_cast<unsigned>(root.integer("threads", 1, 1, 1024));
  c.output = root.text("output", c.kind.empty() ? std::string("phase_diagram") : c.kind);
  c.base_dir = std::move(base_dir);
  c.document = std::move(doc);
  return c;
}

ExperimentConfig load_config(const std::string& path, bool require_kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigNotFound, "config not found: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  return parse_config(text.str(), dir.empty() ? "." : dir.string(), require_kind);
}

std::string Table::to_csv(const std::string& config_hash, std::uint64_t seed) const {
  std::string out = "# config_hash=" + config_hash + " seed=" + std::to_string(seed) + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_field(r[i]);
    out += "\n";
  }
  return out;
}

std::string Table::to_json(const std::string& config_hash, std::uint64_t seed) const {
  Json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["columns"] = columns;
  auto& rs = j["rows"] = Json::array();
  for (const auto& r : rows) {
    auto v = Json::array();
    for (const Cell& c : r) v.push_back(json_field(c));
    rs.push_back(std::move(v));
  }
  j["extras"] = extras;
  return j.dump(2) + "\n";
}

Table run_experiment(const ExperimentConfig& config) {
  Context ctx(config);
  const std::string& k = config.kind;
  if (k == "growth_profile") run_growth_profile(ctx);
  else if (k == "speed") run_speed(ctx);
  else if (k == "mc_slope_sweep") run_slope_sweep(ctx);
  else if (k == "dirichlet") run_dirichlet(ctx);
  else if (k == "spectra") run_spectra(ctx);
  else if (k == "bernoulli_sweep") run_bernoulli_sweep(ctx);
  else if (k == "translation") run_translation(ctx);
  else if (k == "verify_gaussian") run_verify_gaussian(ctx);
  else schema("experiment", "unknown experiment '" + k + "'");
  return std::move(ctx.table);
}

Table sweep_phase_diagram(const ExperimentConfig& config) {
  const View root(config.document, "");
  const phase::Model model = model_from(root);
  const std::vector<double> grid = root.grid("grid");
  const bool proper = root.flag("proper", true);
  const bool with_mc = root.has("mc");
  int depth = 0;
  std::size_t trials = 0;
  if (with_mc) {
    const View mc = root.sub("mc");
    depth = depth_of(mc, "depth", 8);
    trials = trials_of(mc, 8);
  }
  const TreeSpec spec = tree_from(root, config.base_dir, std::max(depth, 1));
  const double delta = delta_for(root, spec);
  const phase::CriticalSet crit = phase::critical_parameters(model, delta);
  const double crit_low = model == phase::Model::Gaussian ? crit.t_amen_lower : crit.p_low;
  const double crit_high = model == phase::Model::Gaussian ? crit.t_diss : crit.p_high;
  const Execution exec{config.threads};

  Table table;
  table.columns = kPhaseColumns;
  const std::string s = spec.descriptor();
  for (double param : grid) {
    const phase::Regime regime = model == phase::Model::Gaussian ? phase::classify_gaussian(param, delta, proper)
                                                                 : phase::classify_bernoulli(param, delta, proper);
    std::vector<Cell> row = {phase::to_string(model), s, delta, param, phase::to_string(regime.label)};
    row.push_back(regime.label == phase::RegimeLabel::TypeIIIlambda ? Cell(regime.lambda) : Cell{});
    row.push_back(regime.provenance);
    row.push_back(crit_low);
    row.push_back(crit_high);
    if (with_mc) {
      const phase::SlopeReport r = phase::mc_growth_slope(spec, weights_for(model, param), depth, trials, config.seed, exec);
      row.insert(row.end(), {integer(depth), count(trials), config.seed, r.slope, r.ci_lo, r.ci_hi,
                             phase::to_string(r.classification)});
    } else {
      row.resize(kPhaseColumns.size());
    }
    table.rows.push_back(std::move(row));
  }
  table.extras["critical"] = {{"delta", crit.delta}};
  if (model == phase::Model::Gaussian) {
    table.extras["critical"]["t_diss"] = crit.t_diss;
    table.extras["critical"]["t_lower"] = crit.t_lower;
    table.extras["critical"]["t_amen_lower"] = crit.t_amen_lower;
  } else {
    table.extras["critical"]["p_low"] = crit.p_low;
    table.extras["critical"]["p_high"] = crit.p_high;
  }
  return table;
}

std::string print_constants(int d) {
  const free_group::SpectralConstants c = free_group::spectral_constants(d);
  const phase::CriticalSet b = phase::critical_parameters(phase::Model::Bernoulli, c.delta);
  const phase::CriticalSet g = phase::critical_parameters(phase::Model::Gaussian, c.delta);
  std::string out;
  auto line = [&](const std::string& k, double v) { out += k + " = " + format_double(v) + "\n"; };
  out += "group = F_" + std::to_string(d) + "\n";
  out += "tree = " + TreeSpec::cayley(d, 0).descriptor() + "\n";
  line("delta", c.delta);
  line("rho", c.rho);
  line("t_lower", g.t_lower);
  line("t_amen_lower", c.t_amen_lower);
  line("t_diss", c.t_diss);
  line("b_radius", c.b_radius);
  line("p_low", b.p_low);
  line("p_high", b.p_high);
  return out;
}

void write_artifacts(const std::string& prefix, const Table& table, const ExperimentConfig& config) {
  const std::filesystem::path base(prefix);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  const std::string hash = config.hash();
  for (const auto& [ext, body] : {std::pair{".csv", table.to_csv(hash, config.seed)},
                                  std::pair{".json", table.to_json(hash, config.seed)}}) {
    const std::string path = prefix + ext;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw Error(ErrorCode::RuntimeFailure, "cannot write " + path);
  }
}

}  // namespace treephase::cli

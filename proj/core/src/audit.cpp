#include "mmt/audit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "mmt/channel.hpp"
#include "mmt/curves_io.hpp"
#include "mmt/error.hpp"
#include "mmt/functionals.hpp"
#include "mmt/least_favorable.hpp"
#include "mmt/math.hpp"
#include "mmt/width.hpp"

namespace mmt {
namespace {

using nlohmann::json;

// sech^2(1) (Phi(0) - Phi(-2)) / 2.
constexpr double kBinaryAreaConstant = 0.10021634956022213;
constexpr double kRdOracleTol = 1e-6;
constexpr double kLayerCakeRelTol = 2e-3;
constexpr double kFtGridStep = 0.02;
constexpr double kFtGridTol = 1e-2;
constexpr std::size_t kStepPieces = 32;
constexpr double kResolvedRelStderr = 0.1;

class Context {
 public:
  Context(const Instance& inst, const AuditBudget& budget)
      : inst_(inst),
        budget_(budget),
        emb_(inst.process()),
        prior_(inst.prior_law()),
        metric_(metric_of(emb_)),
        cert_(decay_certificate(metric_)),
        grid_(snr_grid(cert_, budget.grid_points)) {}

  const Instance& inst() const { return inst_; }
  const AuditBudget& budget() const { return budget_; }
  const EmbeddedProcess& emb() const { return emb_; }
  const Prior& prior() const { return prior_; }
  const FiniteMetric& metric() const { return metric_; }
  const DecayCertificate& cert() const { return cert_; }
  const std::vector<double>& grid() const { return grid_; }

  Seed seed_for(std::string_view label) const { return derive_seed(inst_.seed, label); }

  const ChannelCurves& curves() {
    if (!curves_) curves_ = channel_curves(emb_, prior_, grid_, budget_.samples, seed_for("channel"));
    return *curves_;
  }
  const WidthEstimate& width() {
    if (!width_) width_ = width_mc(emb_, budget_.samples, seed_for("width"));
    return *width_;
  }
  double sqrt_rate_uniform() {
    if (!sqrt_rate_) sqrt_rate_ = sqrt_rate_integral(metric_, Prior::uniform(emb_.size()), budget_.rd_tol);
    return *sqrt_rate_;
  }
  /// A pair of points at distance diam (0, 0 for a singleton).
  std::pair<std::size_t, std::size_t> diameter_pair() const {
    std::pair<std::size_t, std::size_t> best{0, 0};
    for (std::size_t a = 0; a < metric_.size(); ++a)
      for (std::size_t b = a + 1; b < metric_.size(); ++b)
        if (metric_(a, b) > metric_(best.first, best.second)) best = {a, b};
    return best;
  }

 private:
  const Instance& inst_;
  const AuditBudget& budget_;
  EmbeddedProcess emb_;
  Prior prior_;
  FiniteMetric metric_;
  DecayCertificate cert_;
  std::vector<double> grid_;
  std::optional<ChannelCurves> curves_;
  std::optional<WidthEstimate> width_;
  std::optional<double> sqrt_rate_;
};

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

/// Pass iff the condition holds and no involved number is NaN or infinite.
CheckStatus verdict(bool holds, const CheckRecord& r) {
  return holds && finite_all({r.lhs, r.rhs, r.tolerance, r.std_error}) ? CheckStatus::Pass : CheckStatus::Fail;
}

// Width-MLE area: half the area under the MLE error curve is the width.
void check_area_identity(Context& ctx, CheckRecord& r) {
  const WidthEstimate& w = ctx.width();
  const SnrIntegral area = integrate_snr_curve(ctx.curves().mse_mle, ctx.cert());
  r.lhs = 0.5 * area.value;
  r.rhs = w.value;
  r.std_error = std::hypot(0.5 * area.std_error, w.std_error);
  r.tolerance = 3.0 * r.std_error + 0.5 * area.tail_bound + 0.5 * area.quadrature_error;
  r.samples = ctx.budget().samples;
  r.seed = ctx.seed_for("channel");
  r.rule = "|lhs - rhs| <= 3 stderr + tail/2 + quadrature/2";
  r.details = {{"tail_bound", 0.5 * area.tail_bound},
               {"quadrature_error", 0.5 * area.quadrature_error},
               {"s_max", area.s_max},
               {"width_stderr", w.std_error}};
  r.status = verdict(std::abs(r.lhs - r.rhs) <= r.tolerance, r);
}

// I-MMSE: central difference of the information equals s * mmse.
void check_immse(Context& ctx, CheckRecord& r) {
  const ChannelCurves& c = ctx.curves();
  const auto& grid = c.mmse.grid;
  r.samples = ctx.budget().samples;
  r.seed = ctx.seed_for("channel");
  r.rule = "at every interior grid point |gap| <= discretization + 4 stderr";
  bool holds = true;
  double worst = -kInf;
  for (std::size_t i = 0; i < c.immse_gap.grid.size(); ++i) {
    const std::size_t k = i + 1;
    // The difference quotient is the average of u mmse(u) over [s_{k-1}, s_{k+1}];
    // its gap to s_k mmse(s_k) is estimated by the trapezoid rule.
    const double h0 = grid[k] - grid[k - 1];
    const double h1 = grid[k + 1] - grid[k];
    const double f0 = grid[k - 1] * c.mmse.values[k - 1];
    const double f1 = grid[k] * c.mmse.values[k];
    const double f2 = grid[k + 1] * c.mmse.values[k + 1];
    const double average = (0.5 * h0 * (f0 + f1) + 0.5 * h1 * (f1 + f2)) / (h0 + h1);
    const double disc = std::abs(average - f1);
    const double tol = disc + 4.0 * c.immse_gap.std_errors[i];
    const double gap = c.immse_gap.values[i];
    const double excess = std::abs(gap) - tol;
    if (excess > worst) {
      worst = excess;
      r.lhs = gap;
      r.rhs = 0.0;
      r.tolerance = tol;
      r.std_error = c.immse_gap.std_errors[i];
      r.details["s"] = c.immse_gap.grid[i];
    }
    holds = holds && excess <= 0.0;
  }
  r.details["points"] = static_cast<double>(c.immse_gap.grid.size());
  r.status = verdict(holds, r);
}

// Bayes optimality: the posterior mean beats the MLE.
void check_bayes(Context& ctx, CheckRecord& r) {
  const ChannelCurves& c = ctx.curves();
  r.samples = ctx.budget().samples;
  r.seed = ctx.seed_for("channel");
  r.rule = "mmse <= mse_mle + 3 stderr at every grid point";
  bool holds = true;
  double worst = -kInf;
  for (std::size_t k = 0; k < c.mmse.grid.size(); ++k) {
    const double se = std::hypot(c.mmse.std_errors[k], c.mse_mle.std_errors[k]);
    const double excess = c.mmse.values[k] - c.mse_mle.values[k] - 3.0 * se;
    if (excess > worst) {
      worst = excess;
      r.lhs = c.mmse.values[k];
      r.rhs = c.mse_mle.values[k];
      r.std_error = se;
      r.tolerance = 3.0 * se;
      r.details["s"] = c.mmse.grid[k];
    }
    holds = holds && excess <= 0.0;
  }
  r.status = verdict(holds, r);
}

// Nishimori: D(I(s))^2 <= 2 mmse(s).
void check_nishimori_rd(Context& ctx, CheckRecord& r) {
  const ChannelCurves& c = ctx.curves();
  const std::size_t K = c.mmse.grid.size();
  r.samples = ctx.budget().samples;
  r.seed = ctx.seed_for("channel");
  r.rule = "distortion_at_rate(mi)^2 <= 2 mmse + 4 stderr(2 mmse) at resolved grid points past s = 0";
  const double cap = entropy(ctx.prior());
  // Far out the errors are rare events that the sample never sees, and the
  // estimate and its stderr both collapse; keep points with relative stderr
  // <= 10%.
  std::vector<std::size_t> resolved;
  for (std::size_t k = 1; k < K; ++k)
    if (c.mmse.values[k] > 0.0 && c.mmse.std_errors[k] <= kResolvedRelStderr * c.mmse.values[k]) resolved.push_back(k);
  const std::size_t want = std::min(ctx.budget().nishimori_points, resolved.size());
  bool holds = true;
  double worst = -kInf;
  for (std::size_t j = 0; j < want; ++j) {
    const std::size_t k = resolved[want == 1 ? 0
                                             : static_cast<std::size_t>(std::llround(
                                                   static_cast<double>(j) * static_cast<double>(resolved.size() - 1) /
                                                   static_cast<double>(want - 1)))];
    const double rate = std::clamp(c.mi.values[k], 0.0, cap);
    const double d = distortion_at_rate(ctx.metric(), ctx.prior(), rate, ctx.budget().rd_tol);
    const double lhs = d * d;
    const double rhs = 2.0 * c.mmse.values[k];
    const double se = 2.0 * c.mmse.std_errors[k];
    const double excess = lhs - rhs - 4.0 * se;
    if (excess > worst) {
      worst = excess;
      r.lhs = lhs;
      r.rhs = rhs;
      r.std_error = se;
      r.tolerance = 4.0 * se;
      r.details["s"] = c.mmse.grid[k];
    }
    holds = holds && excess <= 0.0;
  }
  r.details["points"] = static_cast<double>(want);
  r.details["resolved_points"] = static_cast<double>(resolved.size());
  if (want == 0) {
    r.lhs = r.rhs = 0.0;
  }
  r.status = verdict(holds, r);
}

// Half the rate integral is at most the width, for every prior.
void check_goal(Context& ctx, CheckRecord& r) {
  const WidthEstimate& w = ctx.width();
  const std::size_t n = ctx.emb().size();
  r.seed = ctx.seed_for("A5");
  r.samples = ctx.budget().samples;
  r.rule = "max over priors of sqrt_rate_integral / 2 <= width + 3 stderr";
  double worst = ctx.sqrt_rate_uniform() * 0.5;
  for (std::size_t k = 0; k < ctx.budget().dirichlet_priors; ++k) {
    CounterRng rng(r.seed, k);
    std::vector<double> weights(n);
    for (double& v : weights) v = -std::log(rng.uniform());
    worst = std::max(worst, 0.5 * sqrt_rate_integral(ctx.metric(), Prior::normalized(weights), ctx.budget().rd_tol));
  }
  r.lhs = worst;
  r.rhs = w.value;
  r.std_error = w.std_error;
  r.tolerance = 3.0 * w.std_error;
  r.details["priors"] = static_cast<double>(1 + ctx.budget().dirichlet_priors);
  r.status = verdict(r.lhs <= r.rhs + r.tolerance, r);
}

// The width is at least the two-point value on the diameter.
void check_width_diameter(Context& ctx, CheckRecord& r) {
  const WidthEstimate& w = ctx.width();
  r.lhs = w.value;
  r.rhs = ctx.metric().diam / std::sqrt(2.0 * std::numbers::pi);
  r.std_error = w.std_error;
  r.tolerance = 4.0 * w.std_error;
  r.samples = w.samples;
  r.seed = w.seed;
  r.rule = "width >= diam / sqrt(2 pi) - 4 stderr";
  r.status = verdict(r.lhs >= r.rhs - r.tolerance, r);
}

// Layer cake: integral of D / sqrt(A) equals twice the integral of sqrt(R).
void check_layer_cake(Context& ctx, CheckRecord& r) {
  const Prior uniform = Prior::uniform(ctx.emb().size());
  r.lhs = layer_cake_integral(ctx.metric(), uniform, ctx.budget().rd_tol);
  r.rhs = 2.0 * ctx.sqrt_rate_uniform();
  r.tolerance = kLayerCakeRelTol * std::max(1.0, r.rhs);
  r.rule = "|lhs - rhs| <= 2e-3 max(1, rhs)";
  r.status = verdict(std::abs(r.lhs - r.rhs) <= r.tolerance, r);
}

// Rate-distortion solver against the two-point closed form on the diameter pair.
void check_rd_oracle(Context& ctx, CheckRecord& r) {
  r.rule = "max |rate_at_distortion - closed form| <= 1e-6 over r = 0, 0.1 diam, ..., diam";
  r.tolerance = kRdOracleTol;
  const auto [a, b] = ctx.diameter_pair();
  if (a == b) {
    r.status = CheckStatus::Pass;
    r.details["vacuous"] = 1.0;
    return;
  }
  const double diam = ctx.metric().diam;
  Eigen::MatrixXd d(2, 2);
  d << 0.0, diam, diam, 0.0;
  const FiniteMetric pair = FiniteMetric::from_distances(d);
  const Prior half = Prior::uniform(2);
  double worst = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double rr = std::min(diam, 0.1 * k * diam);
    const double got = rate_at_distortion(pair, half, rr, ctx.budget().rd_tol);
    const double want = two_point_rd_exact(diam, 0.5, rr);
    if (std::abs(got - want) >= worst) {
      worst = std::abs(got - want);
      r.lhs = got;
      r.rhs = want;
      r.details["r"] = rr;
    }
  }
  r.status = verdict(worst <= r.tolerance, r);
}

// Integrated MMSE of the two-point prior on the diameter is at least 0.1002 diam.
void check_binary_area(Context& ctx, CheckRecord& r) {
  r.rule = "integrated mmse (uniform prior on a diameter pair) + 3 stderr >= 0.10021634956 diam";
  r.rhs = kBinaryAreaConstant * ctx.metric().diam;
  const auto [a, b] = ctx.diameter_pair();
  if (a == b) {
    r.lhs = 0.0;
    r.status = CheckStatus::Pass;
    r.details["vacuous"] = 1.0;
    return;
  }
  std::vector<double> w(ctx.emb().size(), 0.0);
  w[a] = w[b] = 0.5;
  r.seed = ctx.seed_for("A9");
  r.samples = ctx.budget().samples;
  const SnrCurve curve = mmse_curve(ctx.emb(), Prior::from_weights(w), ctx.grid(), r.samples, r.seed);
  const SnrIntegral area = integrate_snr_curve(curve, ctx.cert());
  r.lhs = area.value;
  r.std_error = area.std_error;
  r.tolerance = 3.0 * area.std_error + area.quadrature_error;
  r.details["exact_binary"] = binary_integrated_mmse(ctx.metric().diam);
  r.status = verdict(r.lhs + r.tolerance >= r.rhs, r);
}

// Scaling solver contract: tight marginals and a monotone trace.
void check_sinkhorn(Context& ctx, CheckRecord& r) {
  r.rule = "max marginal residual <= rd_tol on a monotone Pareto trace";
  const RDCurve curve = pareto_trace(ctx.metric(), ctx.prior(), default_lambda_grid(ctx.metric()), ctx.budget().rd_tol);
  r.lhs = curve.max_marginal_residual;
  r.rhs = ctx.budget().rd_tol;
  r.details["points"] = static_cast<double>(curve.points.size());
  r.status = verdict(r.lhs <= r.rhs, r);
}

// Fernique-Talagrand optimizer: never worse than uniform, close to a lattice search.
void check_ft(Context& ctx, CheckRecord& r) {
  const std::size_t n = ctx.emb().size();
  r.seed = ctx.seed_for("A11");
  const FtResult opt = ft_optimize(ctx.metric(), FtBudget{}, r.seed);
  MeasureOnT uniform{std::vector<double>(n, 1.0 / static_cast<double>(n)), 0.0};
  const double at_uniform = ft_value(ctx.metric(), uniform);
  r.lhs = opt.value;
  r.details["uniform"] = at_uniform;
  bool holds = opt.value <= at_uniform * (1.0 + 1e-12);
  if (n <= 4) {
    const FtResult grid = ft_grid_search(ctx.metric(), kFtGridStep);
    r.rhs = grid.value;
    r.tolerance = kFtGridTol;
    r.rule = "optimized <= value at uniform and |optimized - lattice search (step 0.02)| <= 1e-2";
    holds = holds && std::abs(opt.value - grid.value) <= kFtGridTol;
  } else {
    r.rhs = at_uniform;
    r.rule = "optimized <= value at uniform";
  }
  r.status = verdict(holds, r);
}

// Partition gamma_2: a larger level-0 cap can only lower the value.
void check_gamma2(Context& ctx, CheckRecord& r) {
  r.rule = "gamma2(level-0 cap 2) <= gamma2(level-0 cap 1)";
  if (ctx.emb().size() > kGamma2MaxPoints) {
    r.status = CheckStatus::ReportOnly;
    r.lhs = r.rhs = std::numeric_limits<double>::quiet_NaN();
    r.error = "TooLarge: exhaustive enumeration stops at 8 points";
    return;
  }
  r.lhs = gamma2_part_exact(ctx.metric(), 2);
  r.rhs = gamma2_part_exact(ctx.metric(), 1);
  r.status = verdict(r.lhs <= r.rhs + 1e-12, r);
}

// Report-only sandwich ratios between width, the FT functional and the
// least-favorable lower bounds.
void check_sandwich(Context& ctx, CheckRecord& r) {
  r.rule = "report only: width / M, width / sup sqrt-rate integral, sup integrated mmse / M";
  r.seed = ctx.seed_for("A13");
  const WidthEstimate& w = ctx.width();
  const FtResult ft = ft_optimize(ctx.metric(), FtBudget{}, derive_seed(r.seed, "ft"));
  SearchBudget sb;
  sb.restarts = ctx.budget().search_restarts;
  sb.iterations = ctx.budget().search_iterations;
  sb.samples = ctx.budget().search_samples;
  sb.rd_tol = ctx.budget().rd_tol;
  const double rd = least_favorable_search(ctx.emb(), SearchObjective::SqrtRateIntegral, sb, derive_seed(r.seed, "rd")).value;
  const double z = least_favorable_search(ctx.emb(), SearchObjective::IntegratedMmse, sb, derive_seed(r.seed, "z")).value;
  r.lhs = w.value;
  r.rhs = ft.value;
  r.std_error = w.std_error;
  r.samples = w.samples;
  r.details = {{"ft", ft.value},
               {"sqrt_rate_sup", rd},
               {"integrated_mmse_sup", z},
               {"width_over_ft", w.value / ft.value},
               {"width_over_sqrt_rate", w.value / rd},
               {"integrated_mmse_over_ft", z / ft.value}};
  r.status = CheckStatus::ReportOnly;
}

// Report-only penalized functional of y = sqrt(R) against its integral.
void check_penalized(Context& ctx, CheckRecord& r) {
  r.rule = "report only: penalized functional of sqrt(R) over its integral (uniform prior, step approximation)";
  const std::size_t n = ctx.emb().size();
  const Prior uniform = Prior::uniform(n);
  const double diam = ctx.metric().diam;
  if (n < 2) {
    r.lhs = r.rhs = 0.0;
    r.status = CheckStatus::ReportOnly;
    return;
  }
  const double upper = std::min(diam, std::sqrt(independent_distortion_sq(ctx.metric(), uniform)));
  StepFunction y;
  y.end = diam;
  for (std::size_t k = 0; k < kStepPieces; ++k) {
    const double right = upper * static_cast<double>(k + 1) / static_cast<double>(kStepPieces);
    double v = std::sqrt(rate_at_distortion(ctx.metric(), uniform, std::min(right, diam), ctx.budget().rd_tol));
    if (!y.values.empty()) v = std::min(v, y.values.back());
    y.knots.push_back(upper * static_cast<double>(k) / static_cast<double>(kStepPieces));
    y.values.push_back(v);
  }
  r.lhs = penalized_functional(y);
  r.rhs = step_integral(y);
  r.details["ratio"] = r.lhs / r.rhs;
  r.status = CheckStatus::ReportOnly;
}

// Determinism: recomputation with the same seeds is bit-identical.
void check_determinism(Context& ctx, CheckRecord& r) {
  r.rule = "recomputed width, curves and instance serialization are bit-identical";
  const std::size_t small = std::min<std::size_t>(ctx.budget().samples, 4096);
  r.samples = small;
  r.seed = ctx.seed_for("A14");
  const WidthEstimate w1 = width_mc(ctx.emb(), small, r.seed);
  const WidthEstimate w2 = width_mc(ctx.emb(), small, r.seed);
  const auto c1 = to_csv(curves_table(channel_curves(ctx.emb(), ctx.prior(), ctx.grid(), small, r.seed)));
  const auto c2 = to_csv(curves_table(channel_curves(ctx.emb(), ctx.prior(), ctx.grid(), small, r.seed)));
  const std::string j1 = instance_to_json(ctx.inst());
  const std::string j2 = instance_to_json(instance_from_json(j1));
  std::size_t mismatches = 0;
  mismatches += std::memcmp(&w1.value, &w2.value, sizeof(double)) != 0;
  mismatches += std::memcmp(&w1.std_error, &w2.std_error, sizeof(double)) != 0;
  mismatches += c1 != c2;
  mismatches += j1 != j2;
  r.lhs = static_cast<double>(mismatches);
  r.rhs = 0.0;
  r.status = verdict(mismatches == 0, r);
}

using CheckFn = void (*)(Context&, CheckRecord&);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> checks = {
      {"A1", check_area_identity}, {"A2", check_immse},      {"A3", check_bayes},
      {"A4", check_nishimori_rd},  {"A5", check_goal},        {"A6", check_width_diameter},
      {"A7", check_layer_cake},    {"A8", check_rd_oracle},   {"A9", check_binary_area},
      {"A10", check_sinkhorn},     {"A11", check_ft},         {"A12", check_gamma2},
      {"A13", check_sandwich},     {"A14", check_determinism}, {"B1", check_penalized},
  };
  return checks;
}

std::string hex64(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::ReportOnly: return "report_only";
  }
  return "unknown";
}

const std::vector<std::string>& audit_check_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& [id, fn] : registry()) out.push_back(id);
    return out;
  }();
  return ids;
}

bool AuditReport::any_failed() const {
  return std::any_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.status == CheckStatus::Fail; });
}

std::string config_hash(const Instance& inst, const std::set<std::string>& checks, const AuditBudget& b) {
  std::ostringstream os;
  os << instance_to_json(inst) << '|' << kVersion << '|' << b.samples << ',' << b.grid_points << ','
     << format_double(b.rd_tol) << ',' << b.dirichlet_priors << ',' << b.nishimori_points << ','
     << b.search_restarts << ',' << b.search_iterations << ',' << b.search_samples << '|';
  for (const auto& c : checks) os << c << ',';
  return hex64(fnv1a64(os.str()));
}

AuditReport run_audit(const Instance& inst, const std::set<std::string>& checks, const AuditBudget& budget) {
  for (const auto& id : checks)
    if (std::find(audit_check_ids().begin(), audit_check_ids().end(), id) == audit_check_ids().end())
      throw Error(ErrorCode::BadParams, "unknown check id '" + id + "'");
  Context ctx(inst, budget);

  AuditReport report;
  report.instance_name = inst.name;
  report.seed = inst.seed;
  report.config_hash = config_hash(inst, checks, budget);
  for (const auto& [id, fn] : registry()) {
    if (!checks.empty() && !checks.count(id)) continue;
    CheckRecord rec;
    rec.check_id = id;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(ctx, rec);
    } catch (const std::exception& e) {
      rec.status = CheckStatus::Fail;
      rec.error = e.what();
    }
    rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.checks.push_back(std::move(rec));
  }
  return report;
}

std::string report_to_json(const AuditReport& report) {
  json j;
  j["schema"] = kReportSchema;
  j["environment"] = {{"version", kVersion}, {"config_hash", report.config_hash}};
  j["instance"] = report.instance_name;
  j["seed"] = report.seed;
  json list = json::array();
  std::map<std::string, std::size_t> tally{{"pass", 0}, {"fail", 0}, {"report_only", 0}};
  for (const CheckRecord& c : report.checks) {
    json item;
    item["check_id"] = c.check_id;
    item["status"] = to_string(c.status);
    item["lhs"] = number_or_null(c.lhs);
    item["rhs"] = number_or_null(c.rhs);
    item["tolerance"] = number_or_null(c.tolerance);
    item["stderr"] = number_or_null(c.std_error);
    item["samples"] = c.samples;
    item["seed"] = c.seed;
    item["rule"] = c.rule;
    if (!c.error.empty()) item["error"] = c.error;
    json details = json::object();
    for (const auto& [k, v] : c.details) details[k] = number_or_null(v);
    item["details"] = details;
    list.push_back(std::move(item));
    ++tally[std::string(to_string(c.status))];
  }
  j["checks"] = list;
  j["summary"] = tally;
  return j.dump(2) + "\n";
}

std::string timings_to_json(const AuditReport& report) {
  json j = json::object();
  for (const CheckRecord& c : report.checks) j[c.check_id] = {{"runtime_ms", c.runtime_ms}};
  return j.dump(2) + "\n";
}

std::filesystem::path write_report(const AuditReport& report, const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  const fs::path dir = root / report.config_hash;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t k = 0;; ++k) {
    const std::string suffix = k == 0 ? "" : "-" + std::to_string(k);
    const fs::path path = dir / ("report" + suffix + ".json");
    if (fs::exists(path)) continue;
    write_text(path, report_to_json(report));
    write_text(dir / ("timings" + suffix + ".json"), timings_to_json(report));
    return path;
  }
}

}  // namespace mmt

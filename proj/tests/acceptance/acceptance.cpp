// Acceptance run: one PASS/FAIL line per criterion A1-A14, exit status 1 when
// any criterion fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "frozen.hpp"
#include "mmt/audit.hpp"
#include "mmt/channel.hpp"
#include "mmt/curves_io.hpp"
#include "mmt/error.hpp"
#include "mmt/functionals.hpp"
#include "mmt/instance.hpp"
#include "mmt/math.hpp"
#include "mmt/rate_distortion.hpp"
#include "mmt/width.hpp"

namespace {

using namespace mmt;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = true;
  std::ostringstream notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes << " [" << what << "]";
    }
  }
};

// Instances of the per-instance criteria, with their default-budget reports.
struct Audited {
  Instance inst;
  AuditReport report;
  double seconds = 0.0;

  const CheckRecord& check(const std::string& id) const {
    for (const auto& c : report.checks)
      if (c.check_id == id) return c;
    throw Error(ErrorCode::BadParams, "check missing: " + id);
  }
};

std::vector<Instance> instance_set() {
  std::vector<Instance> out;
  out.push_back(generate_instance(Family::TwoPoint, 2, 1, 0));
  for (Seed s = 1; s <= 5; ++s) out.push_back(generate_instance(Family::Cloud, 8, 8, s));
  out.push_back(generate_instance(Family::Simplex, 4, 4, 0));
  out.push_back(generate_instance(Family::Ultrametric, 8, 0, 1));
  out.push_back(generate_instance(Family::Cloud, 16, 16, 6));
  return out;
}

std::vector<Audited> run_audits() {
  std::vector<Audited> out;
  for (Instance& inst : instance_set()) {
    const auto t0 = std::chrono::steady_clock::now();
    AuditReport r = run_audit(inst, {}, AuditBudget{});
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "audited %s in %.1f s\n", inst.name.c_str(), sec);
    out.push_back({std::move(inst), std::move(r), sec});
  }
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Every audited instance passes `id`; failures are listed by instance.
void require_all(Verdict& v, const std::vector<Audited>& audits, const std::string& id) {
  for (const auto& a : audits) {
    const CheckRecord& c = a.check(id);
    v.require(c.status == CheckStatus::Pass, a.inst.name + " " + id + " lhs=" + fmt(c.lhs) + " rhs=" + fmt(c.rhs) +
                                                 " tol=" + fmt(c.tolerance) + (c.error.empty() ? "" : " " + c.error));
  }
}

FiniteMetric table(const std::vector<std::vector<double>>& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return FiniteMetric::from_distances(m);
}

// Mutual information of B = +-1 through Y = alpha B + N, straight from the
// densities: alpha^2 - E log cosh(alpha^2 + alpha N), trapezoid in N.
double binary_mi_direct(double alpha) {
  const double h = 1e-3;
  double acc = 0.0;
  for (double n = -12.0; n <= 12.0 + 0.5 * h; n += h) {
    const double x = std::abs(alpha * alpha + alpha * n);
    const double log_cosh = x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
    acc += normal_pdf(n) * log_cosh;
  }
  return alpha * alpha - acc * h;
}

void a1(Verdict& v, const std::vector<Audited>& audits) {
  // Analytic pipeline: MSE of the two-point MLE at D = 1 is Q(s / 2).
  const FiniteMetric pair = table({{0, 1}, {1, 0}});
  const DecayCertificate cert = decay_certificate(pair);
  SnrCurve curve;
  curve.grid = snr_grid(cert, 4096);
  for (double s : curve.grid) {
    curve.values.push_back(normal_q(0.5 * s));
    curve.std_errors.push_back(0.0);
  }
  const SnrIntegral area = integrate_snr_curve(curve, cert);
  const double half = 0.5 * (area.value + area.tail_bound);
  v.require(std::abs(half - width_two_point_exact(1.0)) <= 1e-4, "analytic half area " + fmt(half));
  v.notes << " analytic=" << fmt(half);

  for (const auto& a : audits) {
    if (a.inst.name.rfind("cloud-n8-d8", 0) != 0) continue;
    const CheckRecord& c = a.check("A1");
    v.require(c.status == CheckStatus::Pass, a.inst.name + " lhs=" + fmt(c.lhs) + " tol=" + fmt(c.tolerance));
    v.require(c.runtime_ms <= 120'000.0, a.inst.name + " took " + fmt(c.runtime_ms) + " ms");
    v.notes << " " << a.inst.name << ":" << fmt(c.lhs) << "/" << fmt(c.tolerance);
  }
}

void a2(Verdict& v, const std::vector<Audited>& audits) {
  const double h = 1e-3;
  double worst = 0.0;
  for (int k = 100; k <= 6000; ++k) {
    const double s = k * h;
    // delta = 1: alpha = s / 2 and the information is a function of alpha.
    const double slope = (binary_mi_direct(0.5 * (s + h)) - binary_mi_direct(0.5 * (s - h))) / (2.0 * h);
    worst = std::max(worst, std::abs(slope - s * binary_channel_exact(1.0, s).mmse));
  }
  v.require(worst <= 1e-3, "exact binary max residual " + fmt(worst));
  v.notes << " exact_max_residual=" << fmt(worst);
  require_all(v, audits, "A2");
}

void a5(Verdict& v) {
  std::size_t pairs = 0;
  double worst_margin = kInf;
  for (Seed s = 1; s <= 5; ++s) {
    const Instance inst = generate_instance(Family::Cloud, 8, 8, s);
    const EmbeddedProcess emb = inst.process();
    const FiniteMetric metric = metric_of(emb);
    const WidthEstimate w = width_mc(emb, AuditBudget{}.samples, derive_seed(inst.seed, "width"));
    for (std::uint64_t k = 0; k < 4; ++k, ++pairs) {
      CounterRng rng(derive_seed(inst.seed, "acceptance-dirichlet"), k);
      std::vector<double> weights(metric.size());
      for (double& x : weights) x = -std::log(rng.uniform());
      const double half = 0.5 * sqrt_rate_integral(metric, Prior::normalized(weights));
      const double margin = w.value + 3.0 * w.std_error - half;
      worst_margin = std::min(worst_margin, margin);
      v.require(margin >= 0.0, inst.name + " prior " + std::to_string(k) + " half=" + fmt(half) +
                                   " width=" + fmt(w.value));
    }
  }
  v.notes << " pairs=" << pairs << " min_margin=" << fmt(worst_margin);
}

void a8(Verdict& v) {
  const FiniteMetric pair = table({{0, 1}, {1, 0}});
  double worst = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double r = 0.1 * k;
    worst = std::max(worst, std::abs(rate_at_distortion(pair, Prior::uniform(2), r) - two_point_rd_exact(1.0, 0.5, r)));
  }
  v.require(worst <= 1e-6, "two-point max error " + fmt(worst));
  double worst3 = 0.0;
  for (const auto& t : std::vector<std::array<double, 3>>{{1, 1, 1}, {1, 0.6, 0.8}, {0.5, 1, 0.7}}) {
    const FiniteMetric m = table({{0, t[0], t[1]}, {t[0], 0, t[2]}, {t[1], t[2], 0}});
    const double r_max = std::sqrt(independent_distortion_sq(m, Prior::uniform(3)));
    for (double frac : {0.0, 0.25, 0.5, 0.75}) {
      const double r = frac * r_max;
      worst3 = std::max(worst3, std::abs(rate_at_distortion(m, Prior::uniform(3), r) -
                                         brute::rd_three_point_uniform(t[0], t[1], t[2], r)));
    }
  }
  v.require(worst3 <= 1e-3, "three-point max error " + fmt(worst3));
  v.notes << " two_point=" << fmt(worst) << " three_point=" << fmt(worst3);
}

void a9(Verdict& v) {
  for (double delta : {0.5, 1.0, 2.0}) {
    const double integral = binary_integrated_mmse(delta);
    v.require(integral >= frozen::kBinaryAreaConstant * delta, "delta=" + fmt(delta) + " integral=" + fmt(integral));
    v.notes << " " << fmt(delta) << ":" << fmt(integral);
  }
}

void a10(Verdict& v, const std::vector<Audited>& audits) {
  require_all(v, audits, "A10");
  double worst = 0.0;
  for (const auto& a : audits) {
    const FiniteMetric metric = metric_of(a.inst.process());
    const Prior prior = a.inst.prior_law();
    for (double lambda : default_lambda_grid(metric)) {
      const Coupling c = gibbs_coupling(metric, prior, lambda);
      worst = std::max(worst, c.marginal_residual);
    }
    const RDCurve trace = pareto_trace(metric, prior, default_lambda_grid(metric));
    for (std::size_t k = 1; k < trace.points.size(); ++k) {
      v.require(trace.points[k].rate >= trace.points[k - 1].rate - 1e-12, a.inst.name + " rate not monotone");
      v.require(trace.points[k].distortion_sq <= trace.points[k - 1].distortion_sq + 1e-12,
                a.inst.name + " distortion not monotone");
    }
  }
  v.require(worst <= 1e-10, "marginal residual " + fmt(worst));
  v.notes << " max_residual=" << fmt(worst);
}

void a11(Verdict& v) {
  const FiniteMetric pair = table({{0, 1}, {1, 0}});
  const FiniteMetric tri = table({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  const double two = ft_value(pair, MeasureOnT{{0.5, 0.5}, 0.0});
  v.require(std::abs(two - frozen::kFtTwoPoint) <= 1e-9, "two-point " + fmt(two));
  const double eq = ft_optimize(tri, {}, 1).value;
  v.require(std::abs(eq - 1.048120) <= 1e-3, "equilateral " + fmt(eq));

  std::vector<Instance> small{generate_instance(Family::TwoPoint, 2, 1, 0),
                              generate_instance(Family::Simplex, 3, 3, 0),
                              generate_instance(Family::Orthonormal, 4, 4, 0),
                              generate_instance(Family::Ultrametric, 4, 0, 1)};
  for (Seed s = 1; s <= 3; ++s) {
    small.push_back(generate_instance(Family::Cloud, 3, 2, s));
    small.push_back(generate_instance(Family::Cloud, 4, 3, s));
  }
  std::size_t agree = 0;
  for (const Instance& inst : small) {
    const FiniteMetric m = metric_of(inst.process());
    const double opt = ft_optimize(m, {}, inst.seed).value;
    const double grid = ft_grid_search(m, 0.02).value;
    const bool ok = std::abs(opt - grid) <= 1e-2;
    agree += ok ? 1 : 0;
    v.require(ok, inst.name + " optimized=" + fmt(opt) + " lattice=" + fmt(grid));
  }
  v.notes << " lattice_agreement=" << agree << "/" << small.size();
}

void a12(Verdict& v) {
  const FiniteMetric one = table({{0}});
  const FiniteMetric pair = table({{0, 1}, {1, 0}});
  const FiniteMetric pair3 = table({{0, 3}, {3, 0}});
  const FiniteMetric tri = table({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  v.require(gamma2_part_exact(one, 1) == 0.0 && gamma2_part_exact(one, 2) == 0.0, "singleton");
  v.require(gamma2_part_exact(pair, 2) == 0.0, "two-point cap 2");
  v.require(gamma2_part_exact(pair, 1) == 1.0 && gamma2_part_exact(pair3, 1) == 3.0, "two-point cap 1");
  v.require(gamma2_part_exact(tri, 1) == 1.0, "equilateral cap 1");
}

void a13(Verdict& v, const std::vector<Audited>& audits) {
  const std::vector<std::string> ratios{"width_over_ft", "width_over_sqrt_rate", "integrated_mmse_over_ft"};
  for (const auto& a : audits) {
    const CheckRecord& c = a.check("A13");
    v.require(c.status == CheckStatus::ReportOnly, a.inst.name + " status");
    for (const auto& key : ratios) {
      const double x = c.details.at(key);
      v.require(std::isfinite(x) && x > 0.0, a.inst.name + " " + key + "=" + fmt(x));
    }
  }
  // Same geometry, different master seeds.
  for (Seed base : {1, 2}) {
    std::map<std::string, std::vector<double>> seen;
    for (Seed s : {base, base + 100, base + 200}) {
      Instance inst = generate_instance(Family::Cloud, 8, 8, base);
      inst.seed = s;
      const CheckRecord c = run_audit(inst, {"A13"}, AuditBudget{}).checks.front();
      for (const auto& key : ratios) seen[key].push_back(c.details.at(key));
    }
    for (const auto& [key, xs] : seen) {
      double mean = 0.0;
      for (double x : xs) mean += x / static_cast<double>(xs.size());
      double spread = 0.0;
      for (double x : xs) spread = std::max(spread, std::abs(x / mean - 1.0));
      v.require(spread <= 0.2, "cloud seed " + std::to_string(base) + " " + key + " spread " + fmt(spread));
      v.notes << " " << base << ":" << key << "=" << fmt(mean) << "+-" << fmt(spread);
    }
  }
}

void a14(Verdict& v, const std::vector<Audited>& audits) {
  const fs::path dir = fs::temp_directory_path() / "mmt_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (std::size_t i : {0, 1}) {
    const Audited& a = audits[i];
    const AuditReport again = run_audit(a.inst, {}, AuditBudget{});
    const fs::path p0 = write_report(a.report, dir / "reports");
    const fs::path p1 = write_report(again, dir / "reports");
    v.require(p0 != p1 && read_text(p0) == read_text(p1), a.inst.name + " report bytes differ");
    const auto c0 = export_curves(a.inst, kDefaultGridPoints, AuditBudget{}.samples, a.inst.seed, dir / "c0.csv");
    const auto c1 = export_curves(a.inst, kDefaultGridPoints, AuditBudget{}.samples, a.inst.seed, dir / "c1.csv");
    v.require(read_text(c0.curves) == read_text(c1.curves), a.inst.name + " curve bytes differ");
    v.require(read_text(c0.rd) == read_text(c1.rd), a.inst.name + " rd bytes differ");
    const Instance reloaded = instance_from_json(instance_to_json(a.inst));
    v.require(report_to_json(run_audit(reloaded, {"A3", "A6"}, AuditBudget{})) ==
                  report_to_json(run_audit(a.inst, {"A3", "A6"}, AuditBudget{})),
              a.inst.name + " reloaded instance differs");
  }
  require_all(v, audits, "A14");
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<Audited> audits = run_audits();

  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"A1", [&](Verdict& v) { a1(v, audits); }},
      {"A2", [&](Verdict& v) { a2(v, audits); }},
      {"A3", [&](Verdict& v) { require_all(v, audits, "A3"); }},
      {"A4",
       [&](Verdict& v) {
         require_all(v, audits, "A4");
         for (const auto& a : audits) {
           const double pts = a.check("A4").details.at("points");
           v.require(pts == 20.0, a.inst.name + " A4 points " + fmt(pts));
         }
       }},
      {"A5", [&](Verdict& v) { a5(v); }},
      {"A6", [&](Verdict& v) { require_all(v, audits, "A6"); }},
      {"A7", [&](Verdict& v) { require_all(v, audits, "A7"); }},
      {"A8", [&](Verdict& v) { a8(v); }},
      {"A9", [&](Verdict& v) { a9(v); }},
      {"A10", [&](Verdict& v) { a10(v, audits); }},
      {"A11", [&](Verdict& v) { a11(v); }},
      {"A12", [&](Verdict& v) { a12(v); }},
      {"A13", [&](Verdict& v) { a13(v, audits); }},
      {"A14", [&](Verdict& v) { a14(v, audits); }},
  };

  bool all = true;
  for (const auto& [id, run] : criteria) {
    Verdict v;
    try {
      run(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("threw: ") + e.what());
    }
    all = all && v.pass;
    std::printf("%s %s%s\n", v.pass ? "PASS" : "FAIL", id.c_str(), v.notes.str().c_str());
  }
  return all ? 0 : 1;
}

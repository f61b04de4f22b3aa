#include "mmt/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mmt/error.hpp"
#include "mmt/math.hpp"
#include "mmt/parallel.hpp"
#include "mmt/stats.hpp"

namespace mmt {
namespace {

constexpr std::size_t kBlock = 1024;
constexpr double kTailTarget = 1e-6;

void check_grid(const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0) throw Error(ErrorCode::BadParams, "SNR grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw Error(ErrorCode::BadParams, "SNR grid must be strictly increasing");
}

void check_prior(const EmbeddedProcess& emb, const Prior& prior) {
  if (prior.size() != emb.size()) throw Error(ErrorCode::BadParams, "prior length does not match index set");
}

std::size_t draw_index(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
  if (idx >= cumulative.size()) idx = cumulative.size() - 1;
  // Never land on a zero-mass atom.
  while (idx > 0 && cumulative[idx] == cumulative[idx - 1]) --idx;
  return idx;
}

std::vector<double> cumulative_of(std::span<const double> w) {
  std::vector<double> c(w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) c[i] = (acc += w[i]);
  return c;
}

double trapezoid(const std::vector<double>& s, const std::vector<double>& f) {
  double area = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) area += 0.5 * (s[k] - s[k - 1]) * (f[k] + f[k - 1]);
  return area;
}

struct Want {
  bool mle = false;
  bool posterior = false;
  bool resample = false;
};

struct ChannelAcc {
  MeanAccumulatorArray mle, mmse, mi, resample, nishimori, immse;
  MeanAccumulator area_mle, area_mmse, area_resample;

  void merge(const ChannelAcc& o) {
    mle.merge(o.mle);
    mmse.merge(o.mmse);
    mi.merge(o.mi);
    resample.merge(o.resample);
    nishimori.merge(o.nishimori);
    immse.merge(o.immse);
    area_mle.merge(o.area_mle);
    area_mmse.merge(o.area_mmse);
    area_resample.merge(o.area_resample);
  }
};

SnrCurve to_curve(const std::vector<double>& grid, const MeanAccumulatorArray& acc, double tail,
                  const MeanAccumulator* area) {
  SnrCurve c;
  c.grid = grid;
  c.values.resize(grid.size());
  c.std_errors.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    c.values[k] = acc[k].mean();
    c.std_errors[k] = acc[k].stderr_of_mean();
  }
  c.tail_bound = tail;
  if (area) c.area_std_error = area->stderr_of_mean();
  return c;
}

/// Per-instance quantities shared by every sample.
struct ChannelSetup {
  Eigen::MatrixXd points;
  Eigen::MatrixXd sq_dist;
  std::vector<double> log_prior;
  std::vector<std::size_t> support;
  std::vector<double> cumulative;

  ChannelSetup(const EmbeddedProcess& emb, const Prior& prior) : points(emb.points()) {
    const FiniteMetric m = metric_of(emb);
    sq_dist = m.dist.cwiseProduct(m.dist);
    log_prior.resize(prior.size());
    for (std::size_t u = 0; u < prior.size(); ++u) {
      log_prior[u] = prior[u] > 0.0 ? std::log(prior[u]) : -kInf;
      if (prior[u] > 0.0) support.push_back(u);
    }
    cumulative = cumulative_of(prior.weights());
  }
};

/// Posterior log-weights relative to the truth x: log pi(u) + s <Z, h_u - h_x> - s^2 d(u,x)^2 / 2.
/// Returns log-sum-exp; `logits` holds -inf off the support.
double posterior_logits(const ChannelSetup& c, const Eigen::VectorXd& zproj, std::size_t x, double s,
                        std::vector<double>& logits) {
  const Eigen::Index xi = static_cast<Eigen::Index>(x);
  std::fill(logits.begin(), logits.end(), -kInf);
  for (std::size_t u : c.support) {
    const Eigen::Index ui = static_cast<Eigen::Index>(u);
    logits[u] = c.log_prior[u] + s * (zproj(ui) - zproj(xi)) - 0.5 * s * s * c.sq_dist(ui, xi);
  }
  return log_sum_exp(logits);
}

ChannelCurves run_channel(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                          std::size_t samples, Seed seed, Want want) {
  check_prior(emb, prior);
  check_grid(grid);
  if (samples < 2) throw Error(ErrorCode::BadParams, "need at least 2 samples");

  const ChannelSetup setup(emb, prior);
  const std::size_t n = emb.size();
  const std::size_t dim = emb.dim();
  const std::size_t K = grid.size();
  const double tail = tail_bound_beyond(decay_certificate(metric_of(emb)), grid.back());

  auto block = [&](std::size_t begin, std::size_t end) {
    ChannelAcc acc;
    acc.mle = MeanAccumulatorArray(K);
    acc.mmse = MeanAccumulatorArray(K);
    acc.mi = MeanAccumulatorArray(K);
    acc.resample = MeanAccumulatorArray(K);
    acc.nishimori = MeanAccumulatorArray(K);
    acc.immse = MeanAccumulatorArray(K >= 2 ? K - 2 : 0);

    Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
    Eigen::VectorXd zproj(static_cast<Eigen::Index>(n));
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    Eigen::VectorXd mean(static_cast<Eigen::Index>(dim));
    std::vector<double> logits(n), weights(n), cum(n);
    std::vector<double> loss_mle(K), loss_mmse(K), info(K), loss_resample(K);

    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      const std::size_t x = draw_index(setup.cumulative, rng.uniform());
      rng.fill_normal({z.data(), dim});
      zproj.noalias() = setup.points * z;
      const Eigen::Index xi = static_cast<Eigen::Index>(x);

      for (std::size_t k = 0; k < K; ++k) {
        const double s = grid[k];
        if (want.mle) {
          std::size_t arg = 0;
          double best = -kInf;
          for (std::size_t u = 0; u < n; ++u) {
            const Eigen::Index ui = static_cast<Eigen::Index>(u);
            const double score = zproj(ui) - 0.5 * s * setup.sq_dist(ui, xi);
            if (score > best) {
              best = score;
              arg = u;
            }
          }
          loss_mle[k] = setup.sq_dist(static_cast<Eigen::Index>(arg), xi);
        }
        if (want.posterior) {
          const double lse = posterior_logits(setup, zproj, x, s, logits);
          for (std::size_t u = 0; u < n; ++u) w(static_cast<Eigen::Index>(u)) = std::exp(logits[u] - lse);
          mean.noalias() = setup.points.transpose() * w;
          loss_mmse[k] = (mean - setup.points.row(xi).transpose()).squaredNorm();
          info[k] = -lse;
          if (want.resample) {
            for (std::size_t u = 0; u < n; ++u) weights[u] = w(static_cast<Eigen::Index>(u));
            double run = 0.0;
            for (std::size_t u = 0; u < n; ++u) cum[u] = (run += weights[u]);
            const std::size_t v = draw_index(cum, rng.uniform());
            loss_resample[k] = setup.sq_dist(static_cast<Eigen::Index>(v), xi);
          }
        }
      }

      if (want.mle) {
        for (std::size_t k = 0; k < K; ++k) acc.mle[k].add(loss_mle[k]);
        acc.area_mle.add(trapezoid(grid, loss_mle));
      }
      if (want.posterior) {
        for (std::size_t k = 0; k < K; ++k) {
          acc.mmse[k].add(loss_mmse[k]);
          acc.mi[k].add(info[k]);
        }
        acc.area_mmse.add(trapezoid(grid, loss_mmse));
        for (std::size_t k = 1; k + 1 < K; ++k) {
          const double cd = (info[k + 1] - info[k - 1]) / (grid[k + 1] - grid[k - 1]);
          acc.immse[k - 1].add(cd - grid[k] * loss_mmse[k]);
        }
      }
      if (want.resample) {
        for (std::size_t k = 0; k < K; ++k) {
          acc.resample[k].add(loss_resample[k]);
          acc.nishimori[k].add(loss_resample[k] - 2.0 * loss_mmse[k]);
        }
        acc.area_resample.add(trapezoid(grid, loss_resample));
      }
    }
    return acc;
  };

  const ChannelAcc total = blocked_reduce<ChannelAcc>(samples, kBlock, block);

  ChannelCurves out;
  if (want.mle) out.mse_mle = to_curve(grid, total.mle, tail, &total.area_mle);
  if (want.posterior) {
    out.mmse = to_curve(grid, total.mmse, tail, &total.area_mmse);
    out.mi = to_curve(grid, total.mi, 0.0, nullptr);
    std::vector<double> interior(grid.begin() + (K >= 2 ? 1 : 0), grid.end() - (K >= 2 ? 1 : 0));
    if (K < 2) interior.clear();
    out.immse_gap = to_curve(interior, total.immse, 0.0, nullptr);
  }
  if (want.resample) {
    out.resample_mse = to_curve(grid, total.resample, 2.0 * tail, &total.area_resample);
    out.nishimori_gap = to_curve(grid, total.nishimori, 0.0, nullptr);
  }
  return out;
}

}  // namespace

DecayCertificate decay_certificate(const FiniteMetric& metric) {
  DecayCertificate c;
  c.n = metric.size();
  c.diam = metric.diam;
  c.d_min = metric.d_min;
  return c;
}

double tail_bound_beyond(const DecayCertificate& cert, double s) {
  if (cert.n < 2 || cert.diam <= 0.0) return 0.0;
  return static_cast<double>(cert.n - 1) * cert.diam * cert.diam * (2.0 / cert.d_min) * normal_pdf(0.5 * s * cert.d_min);
}

double certified_s_max(const DecayCertificate& cert) {
  if (cert.n < 2 || cert.diam <= 0.0) return 0.0;
  // phi(a) <= 1e-6 d_min / (2 (n-1) diam)
  const double bound = kTailTarget * cert.d_min / (2.0 * static_cast<double>(cert.n - 1) * cert.diam);
  const double peak = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  if (bound >= peak) return 0.0;
  const double a = std::sqrt(-2.0 * std::log(bound * std::sqrt(2.0 * std::numbers::pi)));
  return 2.0 * a / cert.d_min;
}

std::vector<double> snr_grid(const DecayCertificate& cert, std::size_t points) {
  if (points < 2) throw Error(ErrorCode::BadParams, "grid needs at least 2 points beyond 0");
  std::vector<double> grid{0.0};
  const double s_max = certified_s_max(cert);
  if (s_max <= 0.0) {
    // Nothing decays: any increasing grid works.
    for (std::size_t k = 1; k <= points; ++k) grid.push_back(static_cast<double>(k) / static_cast<double>(points));
    return grid;
  }
  const double knee = std::min(s_max, 8.0 / cert.diam);
  std::size_t n_lin = (points * 5 + 4) / 8;
  if (knee >= s_max) n_lin = points;
  const std::size_t n_geo = points - n_lin;
  for (std::size_t k = 1; k <= n_lin; ++k) grid.push_back(knee * static_cast<double>(k) / static_cast<double>(n_lin));
  const double ratio = s_max / knee;
  for (std::size_t k = 1; k <= n_geo; ++k)
    grid.push_back(knee * std::pow(ratio, static_cast<double>(k) / static_cast<double>(n_geo)));
  grid.back() = s_max;
  return grid;
}

ChannelSample sample_observation(const EmbeddedProcess& emb, const Prior& prior, double s, Seed seed) {
  check_prior(emb, prior);
  if (!(s >= 0.0)) throw Error(ErrorCode::BadParams, "SNR must be >= 0");
  CounterRng rng(seed, 0);
  ChannelSample out;
  out.s = s;
  out.x_index = draw_index(cumulative_of(prior.weights()), rng.uniform());
  out.noise.resize(static_cast<Eigen::Index>(emb.dim()));
  rng.fill_normal({out.noise.data(), emb.dim()});
  out.y = s * emb.point(out.x_index) + out.noise;
  return out;
}

std::size_t mle_point(const EmbeddedProcess& emb, const Eigen::VectorXd& y, double s) {
  if (!(s >= 0.0)) throw Error(ErrorCode::BadParams, "SNR must be >= 0");
  std::size_t arg = 0;
  double best = -kInf;
  for (std::size_t u = 0; u < emb.size(); ++u) {
    const auto h = emb.points().row(static_cast<Eigen::Index>(u));
    const double score = h.dot(y) - 0.5 * s * h.squaredNorm();
    if (score > best) {
      best = score;
      arg = u;
    }
  }
  return arg;
}

std::vector<double> posterior_weights(const EmbeddedProcess& emb, const Prior& prior, const Eigen::VectorXd& y,
                                      double s) {
  check_prior(emb, prior);
  if (!(s >= 0.0)) throw Error(ErrorCode::BadParams, "SNR must be >= 0");
  const std::size_t n = emb.size();
  std::vector<double> logits(n, -kInf);
  for (std::size_t u = 0; u < n; ++u) {
    if (prior[u] <= 0.0) continue;
    const auto h = emb.points().row(static_cast<Eigen::Index>(u));
    logits[u] = std::log(prior[u]) + s * h.dot(y) - 0.5 * s * s * h.squaredNorm();
  }
  const double lse = log_sum_exp(logits);
  std::vector<double> w(n);
  for (std::size_t u = 0; u < n; ++u) w[u] = std::exp(logits[u] - lse);
  return w;
}

ChannelCurves channel_curves(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                             std::size_t samples, Seed seed) {
  return run_channel(emb, prior, grid, samples, seed, Want{true, true, true});
}

SnrCurve mse_mle_curve(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                       std::size_t samples, Seed seed) {
  return run_channel(emb, prior, grid, samples, seed, Want{true, false, false}).mse_mle;
}

SnrCurve mmse_curve(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                    std::size_t samples, Seed seed) {
  return run_channel(emb, prior, grid, samples, seed, Want{false, true, false}).mmse;
}

SnrCurve mutual_info_curve(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                           std::size_t samples, Seed seed) {
  return run_channel(emb, prior, grid, samples, seed, Want{false, true, false}).mi;
}

double integrated_mmse_stratified(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                                  std::size_t samples, Seed seed) {
  check_prior(emb, prior);
  check_grid(grid);
  const ChannelSetup setup(emb, prior);
  const std::size_t n = emb.size();
  const std::size_t dim = emb.dim();
  const std::size_t K = grid.size();

  auto block = [&](std::size_t begin, std::size_t end) {
    MeanAccumulator acc;
    Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
    Eigen::VectorXd zproj(static_cast<Eigen::Index>(n));
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    Eigen::VectorXd mean(static_cast<Eigen::Index>(dim));
    std::vector<double> logits(n), loss(K);
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      rng.fill_normal({z.data(), dim});
      zproj.noalias() = setup.points * z;
      double area = 0.0;
      for (std::size_t x : setup.support) {
        const Eigen::Index xi = static_cast<Eigen::Index>(x);
        for (std::size_t k = 0; k < K; ++k) {
          const double lse = posterior_logits(setup, zproj, x, grid[k], logits);
          for (std::size_t u = 0; u < n; ++u) w(static_cast<Eigen::Index>(u)) = std::exp(logits[u] - lse);
          mean.noalias() = setup.points.transpose() * w;
          loss[k] = (mean - setup.points.row(xi).transpose()).squaredNorm();
        }
        area += prior[x] * trapezoid(grid, loss);
      }
      acc.add(area);
    }
    return acc;
  };
  return blocked_reduce<MeanAccumulator>(samples, kBlock, block).mean();
}

SnrIntegral integrate_snr_curve(const SnrCurve& curve, const DecayCertificate& cert) {
  check_grid(curve.grid);
  if (curve.values.size() != curve.grid.size()) throw Error(ErrorCode::BadParams, "curve/grid size mismatch");

  SnrIntegral out;
  out.s_max = certified_s_max(cert);
  if (curve.grid.back() < out.s_max * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "grid ends at " << curve.grid.back() << " before certified truncation " << out.s_max;
    throw Error(ErrorCode::TailNotCertified, os.str());
  }
  out.value = trapezoid(curve.grid, curve.values);

  std::vector<double> coarse_s, coarse_f;
  for (std::size_t k = 0; k < curve.grid.size(); k += 2) {
    coarse_s.push_back(curve.grid[k]);
    coarse_f.push_back(curve.values[k]);
  }
  if (coarse_s.back() != curve.grid.back()) {
    coarse_s.push_back(curve.grid.back());
    coarse_f.push_back(curve.values.back());
  }
  out.quadrature_error = std::abs(out.value - trapezoid(coarse_s, coarse_f));

  if (std::isfinite(curve.area_std_error)) {
    out.std_error = curve.area_std_error;
  } else {
    // Perfect correlation across grid points bounds the spread of the sum.
    for (std::size_t k = 1; k < curve.grid.size(); ++k) {
      const double h = curve.grid[k] - curve.grid[k - 1];
      out.std_error += 0.5 * h * (curve.std_errors[k] + curve.std_errors[k - 1]);
    }
  }
  out.tail_bound = tail_bound_beyond(cert, curve.grid.back());
  return out;
}

double binary_unit_mmse(double alpha) {
  if (!(alpha >= 0.0)) throw Error(ErrorCode::BadParams, "alpha must be >= 0");
  if (alpha == 0.0) return 1.0;
  auto f = [alpha](double n) {
    const double c = 1.0 / std::cosh(alpha * (alpha + n));
    return normal_pdf(n) * c * c;
  };
  // sech^2 is below 1e-26 once |alpha (alpha + n)| > 30 and phi is negligible
  // beyond |n| = 40, so the mass sits in a window around n = -alpha.
  const double centre = -alpha;
  const double half = std::min(40.0, 30.0 / alpha);
  const double lo = std::max(-40.0, centre - half);
  const double hi = std::min(40.0, centre + half);
  double total = 0.0;
  if (lo < centre) total += integrate(f, lo, centre, 1e-14).value;
  if (centre < hi) total += integrate(f, std::max(lo, centre), hi, 1e-14).value;
  return total;
}

BinaryChannelPoint binary_channel_exact(double delta, double s) {
  if (!(delta > 0.0)) throw Error(ErrorCode::BadParams, "delta must be > 0");
  if (!(s >= 0.0)) throw Error(ErrorCode::BadParams, "SNR must be >= 0");
  BinaryChannelPoint p;
  p.delta = delta;
  p.s = s;
  const double alpha = 0.5 * s * delta;
  p.mmse = 0.25 * delta * delta * binary_unit_mmse(alpha);
  // I-MMSE in the alpha variable: integral_0^s u mmse(u) du = integral_0^alpha a m(a) da.
  auto g = [](double a) { return a * binary_unit_mmse(a); };
  double mi = 0.0;
  double lo = 0.0;
  for (double edge : {0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0}) {
    if (lo >= alpha) break;
    const double hi = std::min(alpha, edge);
    mi += integrate(g, lo, hi, 1e-13).value;
    lo = hi;
  }
  if (lo < alpha) mi += integrate(g, lo, alpha, 1e-13).value;
  p.mi = std::clamp(mi, 0.0, std::numbers::ln2);
  return p;
}

double binary_integrated_mmse(double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::BadParams, "delta must be > 0");
  double area = 0.0;
  double lo = 0.0;
  for (double edge : {0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0}) {
    area += integrate(binary_unit_mmse, lo, edge, 1e-13).value;
    lo = edge;
  }
  // ds = (2 / delta) d alpha, mmse = (delta^2 / 4) m(alpha).
  return 0.5 * delta * area;
}

}  // namespace mmt

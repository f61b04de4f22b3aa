#include "mmt/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "mmt/error.hpp"
#include "mmt/math.hpp"

namespace mmt {
namespace {

/// Distances from each t grouped into balls of increasing radius.
struct BallLayers {
  // For every t: radii[t][j] is the j-th distinct distance, members[t][j] the
  // points at exactly that distance.
  std::vector<std::vector<double>> radii;
  std::vector<std::vector<std::vector<std::size_t>>> members;
  double diam = 0.0;

  explicit BallLayers(const FiniteMetric& metric) : diam(metric.diam) {
    const std::size_t n = metric.size();
    radii.resize(n);
    members.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return metric(t, a) < metric(t, b); });
      for (std::size_t u : order) {
        const double d = metric(t, u);
        if (radii[t].empty() || d > radii[t].back()) {
          radii[t].push_back(d);
          members[t].emplace_back();
        }
        members[t].back().push_back(u);
      }
    }
  }
};

void check_measure(const FiniteMetric& metric, const MeasureOnT& mu) {
  if (mu.weights.size() != metric.size()) throw Error(ErrorCode::BadParams, "measure length does not match metric");
  double sum = 0.0;
  for (double w : mu.weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::BadParams, "measure weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::BadParams, "measure must sum to 1");
}

/// Integral for one centre t, optionally with its gradient in the weights.
double centre_value(const BallLayers& layers, std::size_t t, const std::vector<double>& w,
                    std::vector<double>* grad) {
  const auto& radii = layers.radii[t];
  const auto& members = layers.members[t];
  const std::size_t groups = radii.size();
  if (grad) std::fill(grad->begin(), grad->end(), 0.0);

  double mass = 0.0;
  double total = 0.0;
  // Running derivative of the segments that include each group.
  std::vector<double> seg_deriv(groups, 0.0);
  for (std::size_t j = 0; j < groups; ++j) {
    for (std::size_t u : members[j]) mass += w[u];
    const double next = j + 1 < groups ? radii[j + 1] : layers.diam;
    const double len = next - radii[j];
    if (len <= 0.0 || j + 1 == groups) continue;  // full ball: log 1 / mass = 0
    if (mass <= 0.0) return kInf;
    const double lg = -std::log(mass);
    if (lg <= 0.0) continue;
    const double root = std::sqrt(lg);
    total += len * root;
    seg_deriv[j] = -len / (2.0 * mass * root);
  }
  if (grad) {
    // d/dw_u sums the segments whose ball contains u (group index <= segment index).
    double suffix = 0.0;
    for (std::size_t j = groups; j-- > 0;) {
      suffix += seg_deriv[j];
      for (std::size_t u : members[j]) (*grad)[u] = suffix;
    }
  }
  return total;
}

double sup_value(const BallLayers& layers, const std::vector<double>& w) {
  double best = 0.0;
  for (std::size_t t = 0; t < w.size(); ++t) best = std::max(best, centre_value(layers, t, w, nullptr));
  return best;
}

/// tau * log sum_t exp(F_t / tau) and its gradient.
double smoothed(const BallLayers& layers, const std::vector<double>& w, double tau, std::vector<double>* grad) {
  const std::size_t n = w.size();
  std::vector<double> values(n);
  std::vector<std::vector<double>> grads(grad ? n : 0, std::vector<double>(n));
  for (std::size_t t = 0; t < n; ++t) values[t] = centre_value(layers, t, w, grad ? &grads[t] : nullptr);
  std::vector<double> scaled(n);
  for (std::size_t t = 0; t < n; ++t) scaled[t] = values[t] / tau;
  const double lse = log_sum_exp(scaled);
  if (grad) {
    std::fill(grad->begin(), grad->end(), 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double weight = std::exp(scaled[t] - lse);
      for (std::size_t u = 0; u < n; ++u) (*grad)[u] += weight * grads[t][u];
    }
  }
  return tau * lse;
}

// Restricted growth strings with at most `max_blocks` blocks.
void enumerate_partitions(std::size_t n, std::size_t max_blocks,
                          const std::function<void(const std::vector<std::size_t>&, std::size_t)>& visit) {
  std::vector<std::size_t> label(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == n) {
      visit(label, used);
      return;
    }
    const std::size_t limit = std::min(used + 1, max_blocks);
    for (std::size_t b = 0; b < limit; ++b) {
      label[i] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  if (n == 0) return;
  label[0] = 0;
  rec(1, 1);
}

// Smoothing schedule of ft_optimize, relative to the diameter.
const double kFtTauStart = 0.3;
const double kFtTauEnd = 1e-7;
const double kFtTauFactor = 0.3;
const std::size_t kFtStageIterations = 100;

}  // namespace

double ft_value(const FiniteMetric& metric, const MeasureOnT& mu) {
  check_measure(metric, mu);
  if (metric.size() == 1) return 0.0;
  return sup_value(BallLayers(metric), mu.weights);
}

namespace {

/// Measure with log-weights z: floor + (1 - n floor) softmax(z).
void weights_of(const Eigen::VectorXd& z, double floor, std::vector<double>& w, Eigen::VectorXd& soft) {
  soft = (z.array() - z.maxCoeff()).exp();
  soft /= soft.sum();
  const double keep = 1.0 - floor * static_cast<double>(z.size());
  for (Eigen::Index u = 0; u < z.size(); ++u) w[static_cast<std::size_t>(u)] = floor + keep * soft(u);
}

/// Smoothed objective in log-weight coordinates and its gradient there.
double smoothed_z(const BallLayers& layers, const Eigen::VectorXd& z, double tau, double floor,
                  std::vector<double>& w, Eigen::VectorXd& gz) {
  Eigen::VectorXd soft;
  weights_of(z, floor, w, soft);
  std::vector<double> gw(w.size());
  const double value = smoothed(layers, w, tau, &gw);
  const Eigen::Map<const Eigen::VectorXd> g(gw.data(), static_cast<Eigen::Index>(gw.size()));
  const double keep = 1.0 - floor * static_cast<double>(z.size());
  gz = keep * soft.cwiseProduct(g - Eigen::VectorXd::Constant(z.size(), soft.dot(g)));
  return value;
}

}  // namespace

FtResult ft_optimize(const FiniteMetric& metric, const FtBudget& budget, Seed seed) {
  const std::size_t n = metric.size();
  FtResult best;
  if (n == 1) {
    best.measure.weights = {1.0};
    best.value = 0.0;
    return best;
  }
  if (!(budget.floor >= 0.0) || budget.floor * static_cast<double>(n) >= 1.0)
    throw Error(ErrorCode::BadParams, "atom floor too large for the space");
  const BallLayers layers(metric);
  const double scale = metric.diam;
  const auto dim = static_cast<Eigen::Index>(n);
  bool have_best = false;

  for (std::size_t restart = 0; restart < std::max<std::size_t>(1, budget.restarts); ++restart) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dim);
    if (restart > 0) {
      CounterRng rng(derive_seed(seed, "ft-restart"), restart);
      for (Eigen::Index u = 0; u < dim; ++u) z(u) = std::log(-std::log(rng.uniform()));
    }
    std::vector<double> w(n), trial_w(n);
    Eigen::VectorXd soft;
    weights_of(z, budget.floor, w, soft);
    std::vector<double> best_w = w;
    double best_value = sup_value(layers, w);

    // Continuation in the smoothing temperature. Each stage runs mirror
    // descent on the entropic coordinates, preconditioned by a BFGS metric.
    double tau = kFtTauStart * scale;
    std::size_t used = 0;
    while (used < budget.iterations) {
      Eigen::VectorXd g(dim), g_new(dim), z_new(dim);
      Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dim, dim);
      double value = smoothed_z(layers, z, tau, budget.floor, w, g);
      const bool last_stage = tau <= kFtTauEnd * scale;
      for (std::size_t it = 0; it < kFtStageIterations || last_stage; ++it) {
        if (used++ >= budget.iterations || !std::isfinite(value)) break;
        Eigen::VectorXd dir = -h * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
          h.setIdentity();
          dir = -g;
          slope = -g.squaredNorm();
        }
        if (slope > -1e-30 * scale) break;
        // Cap the first trial at a log-weight change of 2.
        double step = std::min(1.0, 2.0 / dir.cwiseAbs().maxCoeff());
        bool accepted = false;
        double value_new = value;
        for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
          z_new = z + step * dir;
          value_new = smoothed_z(layers, z_new, tau, budget.floor, trial_w, g_new);
          if (value_new <= value + 1e-4 * step * slope) {
            accepted = true;
            break;
          }
        }
        if (!accepted) break;
        const Eigen::VectorXd s_vec = z_new - z;
        const Eigen::VectorXd y_vec = g_new - g;
        const double sy = s_vec.dot(y_vec);
        if (sy > 1e-12 * s_vec.norm() * y_vec.norm()) {
          const double rho = 1.0 / sy;
          const Eigen::VectorXd hy = h * y_vec;
          h += (rho * rho * y_vec.dot(hy) + rho) * s_vec * s_vec.transpose() -
               rho * (hy * s_vec.transpose() + s_vec * hy.transpose());
        }
        const double decrease = value - value_new;
        z = z_new;
        g = g_new;
        value = value_new;
        w = trial_w;
        const double exact = sup_value(layers, w);
        if (exact < best_value) {
          best_value = exact;
          best_w = w;
        }
        if (decrease <= 1e-15 * scale) break;
      }
      if (last_stage) break;
      tau = std::max(tau * kFtTauFactor, kFtTauEnd * scale);
    }

    // Exact value of the returned measure, no smoothing.
    const double exact = sup_value(layers, best_w);
    if (!have_best || exact < best.value) {
      have_best = true;
      best.measure.weights = best_w;
      best.measure.floor = budget.floor;
      best.value = exact;
      best.restart = restart;
    }
  }
  return best;
}

FtResult ft_grid_search(const FiniteMetric& metric, double step) {
  const std::size_t n = metric.size();
  if (!(step > 0.0) || step > 1.0) throw Error(ErrorCode::BadParams, "step must lie in (0, 1]");
  const double inv = 1.0 / step;
  const auto parts = static_cast<std::size_t>(std::llround(inv));
  if (std::abs(inv - static_cast<double>(parts)) > 1e-9 * inv)
    throw Error(ErrorCode::BadParams, "1 / step must be an integer");
  // Lattice size C(parts + n - 1, n - 1).
  double count = 1.0;
  for (std::size_t k = 1; k < n; ++k) count *= static_cast<double>(parts + k) / static_cast<double>(k);
  if (count > 1e7) throw Error(ErrorCode::TooLarge, "simplex lattice has more than 1e7 points");

  FtResult best;
  best.value = kInf;
  if (n == 1) {
    best.measure.weights = {1.0};
    best.value = 0.0;
    return best;
  }
  const BallLayers layers(metric);
  std::vector<std::size_t> k(n, 0);
  std::vector<double> w(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (i + 1 == n) {
      k[i] = left;
      for (std::size_t u = 0; u < n; ++u) w[u] = static_cast<double>(k[u]) / static_cast<double>(parts);
      const double v = sup_value(layers, w);
      if (v < best.value) {
        best.value = v;
        best.measure.weights = w;
      }
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      k[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, parts);
  return best;
}

double gamma2_part_exact(const FiniteMetric& metric, std::size_t level0_cap) {
  const std::size_t n = metric.size();
  if (n > kGamma2MaxPoints) throw Error(ErrorCode::TooLarge, "exhaustive gamma_2 supports at most 8 points");
  if (level0_cap != 1 && level0_cap != 2) throw Error(ErrorCode::BadParams, "level-0 cap must be 1 or 2");
  if (n <= 1) return 0.0;

  // Per level, the per-point cost vector of every admissible partition.
  std::vector<std::vector<std::vector<double>>> levels;
  for (std::size_t level = 0;; ++level) {
    const double cap = level == 0 ? static_cast<double>(level0_cap) : std::exp2(std::exp2(static_cast<double>(level)));
    if (cap >= static_cast<double>(n)) break;
    const double weight = std::exp2(0.5 * static_cast<double>(level));
    std::vector<std::vector<double>> options;
    enumerate_partitions(n, static_cast<std::size_t>(cap), [&](const std::vector<std::size_t>& label, std::size_t blocks) {
      std::vector<double> block_diam(blocks, 0.0);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
          if (label[a] == label[b]) block_diam[label[a]] = std::max(block_diam[label[a]], metric(a, b));
      std::vector<double> cost(n);
      for (std::size_t t = 0; t < n; ++t) cost[t] = weight * block_diam[label[t]];
      options.push_back(std::move(cost));
    });
    std::sort(options.begin(), options.end(), [](const auto& a, const auto& b) {
      return *std::max_element(a.begin(), a.end()) < *std::max_element(b.begin(), b.end());
    });
    levels.push_back(std::move(options));
  }
  if (levels.empty()) return 0.0;

  double best = kInf;
  std::vector<double> partial(n, 0.0);
  std::function<void(std::size_t)> search = [&](std::size_t level) {
    const double current = *std::max_element(partial.begin(), partial.end());
    if (current >= best) return;
    if (level == levels.size()) {
      best = current;
      return;
    }
    for (const auto& cost : levels[level]) {
      for (std::size_t t = 0; t < n; ++t) partial[t] += cost[t];
      search(level + 1);
      for (std::size_t t = 0; t < n; ++t) partial[t] -= cost[t];
    }
  };
  search(0);
  return best;
}

double psi_gibbs(const FiniteMetric& metric, const MeasureOnT& mu, std::size_t x, double alpha) {
  check_measure(metric, mu);
  if (!(alpha > 0.0)) throw Error(ErrorCode::BadParams, "alpha must be > 0");
  if (x >= metric.size()) throw Error(ErrorCode::BadParams, "index outside the metric space");
  std::vector<double> terms(metric.size(), -kInf);
  const double inv = 1.0 / (alpha * alpha);
  for (std::size_t y = 0; y < metric.size(); ++y)
    if (mu.weights[y] > 0.0) terms[y] = std::log(mu.weights[y]) - inv * metric.squared(x, y);
  return -log_sum_exp(terms);
}

namespace {

void check_step(const StepFunction& y) {
  if (y.knots.empty() || y.knots.size() != y.values.size())
    throw Error(ErrorCode::MalformedStep, "knots and values must be nonempty and of equal length");
  if (y.knots.front() != 0.0) throw Error(ErrorCode::MalformedStep, "first knot must be 0");
  if (!(y.end >= 0.0) || !std::isfinite(y.end)) throw Error(ErrorCode::MalformedStep, "end must be finite and >= 0");
  for (std::size_t k = 0; k < y.knots.size(); ++k) {
    if (!(y.values[k] >= 0.0) || !std::isfinite(y.values[k]))
      throw Error(ErrorCode::MalformedStep, "values must be finite and >= 0");
    if (k > 0 && !(y.knots[k] > y.knots[k - 1])) throw Error(ErrorCode::MalformedStep, "knots must increase");
    if (k > 0 && y.values[k] > y.values[k - 1]) throw Error(ErrorCode::MalformedStep, "values must not increase");
  }
  if (y.end > 0.0 && !(y.knots.back() < y.end)) throw Error(ErrorCode::MalformedStep, "knots must stay below end");
}

}  // namespace

double penalized_functional(const StepFunction& y) {
  check_step(y);
  if (y.end == 0.0) return 0.0;

  // Candidates a + b beta with beta = alpha^-2: the inner inf over r is taken
  // at a knot (left end of a constant piece) or at r = end where y = 0.
  std::vector<double> a, b;
  for (std::size_t k = 0; k < y.knots.size(); ++k) {
    a.push_back(y.values[k] * y.values[k]);
    b.push_back(y.knots[k] * y.knots[k]);
  }
  a.push_back(0.0);
  b.push_back(y.end * y.end);

  std::vector<double> cuts;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (b[i] != b[j]) {
        const double beta = (a[j] - a[i]) / (b[i] - b[j]);
        if (beta > 0.0 && std::isfinite(beta)) cuts.push_back(beta);
      }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto argmin_at = [&](double beta) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
      const double vi = a[i] + b[i] * beta;
      const double vb = a[best] + b[best] * beta;
      if (vi < vb || (vi == vb && b[i] < b[best])) best = i;
    }
    return best;
  };

  // Walk beta-intervals (0, c_1), (c_1, c_2), ..., (c_m, inf).
  std::vector<double> edges{0.0};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(kInf);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double lo = edges[k];
    const double hi = edges[k + 1];
    const double mid = std::isinf(hi) ? (lo > 0.0 ? 2.0 * lo : 1.0) : (lo == 0.0 ? 0.5 * hi : 0.5 * (lo + hi));
    const std::size_t i = argmin_at(mid);
    // beta in (lo, hi) <=> alpha in (1/sqrt(hi), 1/sqrt(lo)).
    const double alpha_lo = std::isinf(hi) ? 0.0 : 1.0 / std::sqrt(hi);
    const double alpha_hi = lo == 0.0 ? kInf : 1.0 / std::sqrt(lo);
    if (a[i] != 0.0) {
      if (std::isinf(alpha_hi)) return kInf;
      total += a[i] * (alpha_hi - alpha_lo);
    }
    if (b[i] != 0.0) {
      if (alpha_lo == 0.0) return kInf;
      total += b[i] * (1.0 / alpha_lo - (std::isinf(alpha_hi) ? 0.0 : 1.0 / alpha_hi));
    }
  }
  return total;
}

double step_integral(const StepFunction& y) {
  check_step(y);
  double total = 0.0;
  for (std::size_t k = 0; k < y.knots.size(); ++k) {
    const double next = k + 1 < y.knots.size() ? y.knots[k + 1] : y.end;
    total += y.values[k] * (next - y.knots[k]);
  }
  return total;
}

}  // namespace mmt

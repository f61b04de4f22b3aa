#include "mmt/least_favorable.hpp"

#include <algorithm>
#include <cmath>

#include "mmt/channel.hpp"
#include "mmt/error.hpp"
#include "mmt/rate_distortion.hpp"

namespace mmt {
namespace {

constexpr double kMinStep = 1e-6;

std::vector<double> dirichlet_start(std::size_t n, Seed seed, std::size_t restart) {
  CounterRng rng(derive_seed(seed, "restart"), restart);
  std::vector<double> w(n);
  for (double& v : w) v = -std::log(rng.uniform());
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

double search_objective(const EmbeddedProcess& emb, const Prior& prior, SearchObjective objective,
                        const SearchBudget& budget, Seed seed) {
  const FiniteMetric metric = metric_of(emb);
  switch (objective) {
    case SearchObjective::IntegratedMmse: {
      const std::vector<double> grid = snr_grid(decay_certificate(metric), budget.grid_points);
      return integrated_mmse_stratified(emb, prior, grid, budget.samples, derive_seed(seed, "objective"));
    }
    case SearchObjective::SqrtRateIntegral:
      return sqrt_rate_integral(metric, prior, budget.rd_tol);
  }
  return 0.0;
}

SearchResult least_favorable_search(const EmbeddedProcess& emb, SearchObjective objective,
                                    const SearchBudget& budget, Seed seed) {
  const std::size_t n = emb.size();
  SearchResult best;
  if (n == 1) {
    best.prior = Prior::point_mass(1, 0);
    best.value = 0.0;
    best.accepted = {0.0};
    return best;
  }
  if (budget.restarts == 0) throw Error(ErrorCode::BadParams, "need at least one restart");

  auto eval = [&](const std::vector<double>& w) {
    return search_objective(emb, Prior::normalized(w), objective, budget, seed);
  };

  bool have_best = false;
  for (std::size_t restart = 0; restart < budget.restarts; ++restart) {
    std::vector<double> w =
        restart == 0 ? std::vector<double>(n, 1.0 / static_cast<double>(n)) : dirichlet_start(n, seed, restart);
    double value = eval(w);
    std::vector<double> accepted{value};
    double step = 1.0;

    for (std::size_t it = 0; it < budget.iterations && step >= kMinStep; ++it) {
      std::vector<double> grad(n);
      for (std::size_t u = 0; u < n; ++u) {
        std::vector<double> probe = w;
        for (std::size_t v = 0; v < n; ++v) probe[v] *= (1.0 - budget.fd_step);
        probe[u] += budget.fd_step;
        grad[u] = (eval(probe) - value) / budget.fd_step;
      }
      double scale = 0.0;
      for (double g : grad) scale = std::max(scale, std::abs(g));
      if (scale == 0.0) break;

      // Backtrack until the objective increases.
      for (; step >= kMinStep; step *= 0.5) {
        std::vector<double> trial(n);
        double sum = 0.0;
        for (std::size_t u = 0; u < n; ++u) sum += (trial[u] = w[u] * std::exp(step * grad[u] / scale));
        for (double& t : trial) t = std::max(t / sum, 1e-12);
        const double trial_value = eval(trial);
        if (trial_value > value) {
          w = trial;
          value = trial_value;
          accepted.push_back(value);
          step = std::min(1.0, 1.5 * step);
          break;
        }
      }
    }

    if (!have_best || value > best.value) {
      have_best = true;
      best.prior = Prior::normalized(w);
      best.value = value;
      best.restart = restart;
      best.accepted = accepted;
    }
  }
  return best;
}

}  // namespace mmt

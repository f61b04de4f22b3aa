#pragma once

#include <cstddef>
#include <vector>

#include "mmt/process.hpp"
#include "mmt/random.hpp"

namespace mmt {

enum class SearchObjective {
  IntegratedMmse,    // integral of MMSE_pi(s) over s >= 0
  SqrtRateIntegral,  // integral of sqrt(R_pi(r)) over [0, diam]
};

struct SearchBudget {
  std::size_t restarts = 8;
  std::size_t iterations = 15;
  /// Monte Carlo noise draws per objective evaluation (IntegratedMmse only).
  std::size_t samples = 1000;
  std::size_t grid_points = 24;
  double fd_step = 1e-3;
  double rd_tol = 1e-10;
};

struct SearchResult {
  Prior prior;
  double value = 0.0;
  std::size_t restart = 0;
  /// Objective after every accepted step of the winning restart.
  std::vector<double> accepted;
};

/// Exponentiated-gradient ascent over the simplex with forward-difference
/// gradients and multi-start (restart 0 is uniform, others Dirichlet(1)).
/// Steps are accepted only when the objective increases, so the result is a
/// lower bound on the supremum over priors, not a certificate of optimality.
SearchResult least_favorable_search(const EmbeddedProcess& emb, SearchObjective objective,
                                    const SearchBudget& budget, Seed seed);

/// The objective itself, as evaluated by the search.
double search_objective(const EmbeddedProcess& emb, const Prior& prior, SearchObjective objective,
                        const SearchBudget& budget, Seed seed);

}  // namespace mmt

#pragma once

#include <vector>

#include "frap/mdp.hpp"

namespace frap {
namespace oracle {

/// Brute-force reference solution. Kept deliberately free of any engine or
/// back-up code so agreement between the two is evidence, not tautology.
struct OracleResult {
    std::vector<double> v_star;
    std::vector<double> q_star; // row-major [s][a]
    std::vector<std::vector<ActionId>> optimal_actions; // all argmax actions per state
    long iterations = 0;
    double residual = 0.0;

    double q_at(StateId s, ActionId a, int n_actions) const {
        return q_star[static_cast<std::size_t>(s) * n_actions + a];
    }
};

/// Synchronous Jacobi value-iteration sweeps from V = 0 until the sup-norm
/// residual drops to tol. Throws NonConvergent past the iteration cap.
OracleResult value_iteration(const TabularMdp& mdp, double tol, long max_iterations = 1000000);

/// One extra Jacobi sweep: the per-sweep V tables, index k = V after k sweeps
/// (element 0 is the zero init). Used for bitwise engine comparisons.
std::vector<std::vector<double>> value_iteration_sweeps(const TabularMdp& mdp, int sweeps);

/// Iterative policy evaluation for a stochastic policy (rows sum to 1).
std::vector<double> policy_evaluation(const TabularMdp& mdp,
                                      const std::vector<std::vector<double>>& policy, double tol,
                                      long max_iterations = 1000000);

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0; // 0 when fewer than 2 episodes
    long episodes = 0;
};

/// Empirical discounted return of `policy` from s0 over sampled episodes.
McEstimate mc_return(const TabularMdp& mdp, const std::vector<std::vector<double>>& policy,
                     StateId s0, long episodes, std::uint64_t seed, int horizon_cap = 0);

/// True when `action` attains the optimal value at s within tie_tol.
bool is_optimal_action(const OracleResult& oracle, const TabularMdp& mdp, StateId s,
                       ActionId action, double tie_tol = 1e-9);

} // namespace oracle
} // namespace frap

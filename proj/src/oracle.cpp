#include "frap/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "frap/rng.hpp"

namespace frap {
namespace oracle {

namespace {

/// One Jacobi sweep: v_next[s] = max_a sum_j p * (r + gamma * v[next]).
/// Accumulation follows stored transition order; terminals stay 0.
void sweep(const TabularMdp& mdp, const std::vector<double>& v, std::vector<double>& v_next) {
    const double gamma = mdp.gamma();
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        if (mdp.is_terminal(s)) {
            v_next[s] = 0.0;
            continue;
        }
        double best = -std::numeric_limits<double>::infinity();
        for (ActionId a = 0; a < mdp.n_actions(); ++a) {
            const auto& list = mdp.transitions(s, a);
            if (list.empty()) continue;
            double q = 0.0;
            for (const auto& t : list) q += t.prob * (t.reward + gamma * v[t.next]);
            if (q > best) best = q;
        }
        v_next[s] = best;
    }
}

} // namespace

OracleResult value_iteration(const TabularMdp& mdp, double tol, long max_iterations) {
    OracleResult out;
    out.v_star.assign(static_cast<std::size_t>(mdp.n_states()), 0.0);
    std::vector<double> v_next(out.v_star.size());

    for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
        sweep(mdp, out.v_star, v_next);
        double residual = 0.0;
        for (std::size_t s = 0; s < v_next.size(); ++s)
            residual = std::max(residual, std::abs(v_next[s] - out.v_star[s]));
        out.v_star.swap(v_next);
        out.residual = residual;
        if (residual <= tol) break;
    }
    if (out.residual > tol)
        throw NonConvergent("value iteration residual " + std::to_string(out.residual) +
                            " after " + std::to_string(out.iterations) + " iterations");
    ++out.iterations; // count the last sweep

    const int n_actions = mdp.n_actions();
    out.q_star.assign(out.v_star.size() * n_actions, 0.0);
    out.optimal_actions.resize(out.v_star.size());
    const double gamma = mdp.gamma();
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        if (mdp.is_terminal(s)) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (ActionId a = 0; a < n_actions; ++a) {
            double q = 0.0;
            for (const auto& t : mdp.transitions(s, a))
                q += t.prob * (t.reward + gamma * out.v_star[t.next]);
            out.q_star[static_cast<std::size_t>(s) * n_actions + a] = q;
            best = std::max(best, q);
        }
        for (ActionId a = 0; a < n_actions; ++a)
            if (best - out.q_star[static_cast<std::size_t>(s) * n_actions + a] <= 1e-9)
                out.optimal_actions[s].push_back(a);
    }
    return out;
}

std::vector<std::vector<double>> value_iteration_sweeps(const TabularMdp& mdp, int sweeps) {
    std::vector<std::vector<double>> out;
    out.emplace_back(static_cast<std::size_t>(mdp.n_states()), 0.0);
    for (int k = 0; k < sweeps; ++k) {
        std::vector<double> v_next(out.back().size());
        sweep(mdp, out.back(), v_next);
        out.push_back(std::move(v_next));
    }
    return out;
}

std::vector<double> policy_evaluation(const TabularMdp& mdp,
                                      const std::vector<std::vector<double>>& policy, double tol,
                                      long max_iterations) {
    std::vector<double> v(static_cast<std::size_t>(mdp.n_states()), 0.0);
    std::vector<double> v_next(v.size());
    const double gamma = mdp.gamma();
    double residual = 0.0;
    for (long k = 0; k < max_iterations; ++k) {
        residual = 0.0;
        for (StateId s = 0; s < mdp.n_states(); ++s) {
            if (mdp.is_terminal(s)) {
                v_next[s] = 0.0;
                continue;
            }
            double value = 0.0;
            for (ActionId a = 0; a < mdp.n_actions(); ++a) {
                const double p = policy[s][a];
                if (p == 0.0) continue;
                double q = 0.0;
                for (const auto& t : mdp.transitions(s, a))
                    q += t.prob * (t.reward + gamma * v[t.next]);
                value += p * q;
            }
            v_next[s] = value;
            residual = std::max(residual, std::abs(value - v[s]));
        }
        v.swap(v_next);
        if (residual <= tol) return v;
    }
    throw NonConvergent("policy evaluation residual " + std::to_string(residual));
}

McEstimate mc_return(const TabularMdp& mdp, const std::vector<std::vector<double>>& policy,
                     StateId s0, long episodes, std::uint64_t seed, int horizon_cap) {
    if (horizon_cap <= 0) horizon_cap = 10 * mdp.n_states();
    Rng rng(seed);
    const double gamma = mdp.gamma();
    std::vector<double> returns;
    returns.reserve(static_cast<std::size_t>(episodes));
    for (long e = 0; e < episodes; ++e) {
        StateId s = s0;
        double g = 0.0, discount = 1.0;
        for (int t = 0; t < horizon_cap && !mdp.is_terminal(s); ++t) {
            const ActionId a = rng.categorical(policy[s]);
            const auto& list = mdp.transitions(s, a);
            double u = rng.uniform();
            const Transition* chosen = &list.back();
            for (const auto& tr : list) {
                u -= tr.prob;
                if (u < 0.0) {
                    chosen = &tr;
                    break;
                }
            }
            g += discount * chosen->reward;
            discount *= gamma;
            s = chosen->next;
        }
        returns.push_back(g);
    }
    McEstimate out;
    out.episodes = episodes;
    const auto [lo, hi] = std::minmax_element(returns.begin(), returns.end());
    if (*lo == *hi) { // deterministic episodes: exact
        out.mean = *lo;
        return out;
    }
    double sum = 0.0;
    for (double g : returns) sum += g;
    out.mean = sum / static_cast<double>(episodes);
    if (episodes > 1) {
        double ss = 0.0;
        for (double g : returns) ss += (g - out.mean) * (g - out.mean);
        out.stderr_ = std::sqrt(ss / static_cast<double>(episodes - 1) /
                                static_cast<double>(episodes));
    }
    return out;
}

bool is_optimal_action(const OracleResult& oracle, const TabularMdp& mdp, StateId s,
                       ActionId action, double tie_tol) {
    const int n_actions = mdp.n_actions();
    double best = -std::numeric_limits<double>::infinity();
    for (ActionId a = 0; a < n_actions; ++a) best = std::max(best, oracle.q_at(s, a, n_actions));
    return best - oracle.q_at(s, action, n_actions) <= tie_tol;
}

} // namespace oracle
} // namespace frap

#include "frap/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frap {

std::string to_string(SelectKind kind) {
    switch (kind) {
        case SelectKind::Ordered: return "ordered";
        case SelectKind::Greedy: return "greedy";
        case SelectKind::EpsilonGreedy: return "eps_greedy";
        case SelectKind::Boltzmann: return "boltzmann";
        case SelectKind::Ucb: return "ucb";
        case SelectKind::CountNovelty: return "novelty";
        case SelectKind::StochasticPolicy: return "policy";
    }
    return "?";
}

double ucb_score(double q, long n_parent, long n_child, double c) {
    if (n_child == 0) return std::numeric_limits<double>::infinity();
    const double lg = std::log(static_cast<double>(std::max(n_parent, 1L)));
    return q + c * std::sqrt(lg / static_cast<double>(n_child));
}

std::vector<double> boltzmann_probs(const std::vector<double>& q, double temperature) {
    std::vector<double> probs(q.size());
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : q) hi = std::max(hi, v / temperature);
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        probs[i] = std::exp(q[i] / temperature - hi);
        total += probs[i];
    }
    for (double& p : probs) p /= total;
    return probs;
}

double novelty_bonus(long n_sa, double beta) {
    return beta / std::sqrt(1.0 + static_cast<double>(n_sa));
}

namespace {

ActionId argmax_q(const ActionContext& ctx) {
    ActionId best = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (ActionId a = 0; a < ctx.n_actions; ++a) {
        const double v = ctx.q_value(a);
        if (v > best_q) {
            best_q = v;
            best = a;
        }
    }
    return best;
}

/// Lowest-index locally unvisited action, or -1 if all were tried.
ActionId first_unvisited(const ActionContext& ctx) {
    for (ActionId a = 0; a < ctx.n_actions; ++a)
        if (!ctx.visited(a)) return a;
    return -1;
}

ActionId greedy(const ActionContext& ctx) {
    if (!ctx.has_q_source) {
        const ActionId fresh = first_unvisited(ctx);
        if (fresh >= 0) return fresh; // forced expansion
    }
    return argmax_q(ctx);
}

} // namespace

ActionId select_action(const SelectionRule& rule, Phase phase, const ActionContext& ctx,
                       Rng& rng) {
    switch (rule.for_phase(phase)) {
        case SelectKind::Ordered: {
            // Round-robin: least-tried action, ties to the lowest index.
            ActionId best = 0;
            long best_n = std::numeric_limits<long>::max();
            for (ActionId a = 0; a < ctx.n_actions; ++a) {
                const long n = ctx.count_sa(a);
                if (n < best_n) {
                    best_n = n;
                    best = a;
                }
            }
            return best;
        }
        case SelectKind::Greedy:
            return greedy(ctx);
        case SelectKind::EpsilonGreedy: {
            const double eps = rule.epsilon_at(ctx.decay_step);
            if (rng.uniform() < eps) return rng.index(ctx.n_actions);
            return greedy(ctx);
        }
        case SelectKind::Boltzmann: {
            std::vector<double> q(static_cast<std::size_t>(ctx.n_actions));
            for (ActionId a = 0; a < ctx.n_actions; ++a) q[a] = ctx.q_value(a);
            const auto probs = boltzmann_probs(q, rule.temperature);
            return rng.categorical(probs);
        }
        case SelectKind::Ucb: {
            ActionId best = 0;
            double best_score = -std::numeric_limits<double>::infinity();
            for (ActionId a = 0; a < ctx.n_actions; ++a) {
                const double score =
                    ucb_score(ctx.q_value(a), ctx.count_s, ctx.count_sa(a), rule.ucb_c);
                if (score > best_score) {
                    best_score = score;
                    best = a;
                }
            }
            return best;
        }
        case SelectKind::CountNovelty: {
            ActionId best = 0;
            double best_score = -std::numeric_limits<double>::infinity();
            for (ActionId a = 0; a < ctx.n_actions; ++a) {
                const double score =
                    ctx.q_value(a) + novelty_bonus(ctx.count_sa(a), rule.novelty_beta);
                if (score > best_score) {
                    best_score = score;
                    best = a;
                }
            }
            return best;
        }
        case SelectKind::StochasticPolicy: {
            return rng.categorical(*ctx.policy_probs);
        }
    }
    return 0;
}

NextStateChoice select_next_state(NextStateKind kind, const QueryResult& result, Rng& rng) {
    if (kind == NextStateKind::Ordered) {
        if (!result.distribution)
            throw WrongAccessMode("ordered next-state selection requires descriptive access");
        return {true, -1, 0.0};
    }
    if (result.sample) return {false, result.sample->first, result.sample->second};
    // Sampling from a descriptive answer uses the caller's rng.
    const auto& dist = *result.distribution;
    double u = rng.uniform();
    for (const auto& t : dist) {
        u -= t.prob;
        if (u < 0.0) return {false, t.next, t.reward};
    }
    return {false, dist.back().next, dist.back().reward};
}

} // namespace frap

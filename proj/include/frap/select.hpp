#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "frap/mdp.hpp"
#include "frap/rng.hpp"

namespace frap {

enum class Phase { BeforeFrontier, AfterFrontier, NextRoot };

enum class SelectKind {
    Ordered,
    Greedy,
    EpsilonGreedy,
    Boltzmann,
    Ucb,
    CountNovelty,
    StochasticPolicy,
};

std::string to_string(SelectKind kind);

/// Phase-bound action selection rule plus the knobs of each kind.
struct SelectionRule {
    SelectKind bf = SelectKind::Greedy;
    SelectKind af = SelectKind::Greedy;
    std::optional<SelectKind> nr; // defaults to the BF rule

    double eps = 0.1;
    double eps_final = -1.0; // <0: constant epsilon
    long eps_decay_steps = 0;
    double temperature = 1.0;
    double ucb_c = 1.4142135623730951; // sqrt(2)
    double novelty_beta = 1.0;

    SelectKind for_phase(Phase phase) const {
        switch (phase) {
            case Phase::BeforeFrontier: return bf;
            case Phase::AfterFrontier: return af;
            case Phase::NextRoot: return nr.value_or(bf);
        }
        return bf;
    }

    double epsilon_at(long step) const {
        if (eps_final < 0.0 || eps_decay_steps <= 0) return eps;
        if (step >= eps_decay_steps) return eps_final;
        const double t = static_cast<double>(step) / static_cast<double>(eps_decay_steps);
        return eps + (eps_final - eps) * t;
    }
};

enum class NextStateKind { Sample, Ordered };

/// Everything a selection rule may look at for one state, assembled by the
/// engine. `q_value` resolves the local-else-bootstrap source per action;
/// `has_q_source` is false when unvisited actions have no value to fall back
/// on (greedy then forces expansion of the lowest-index unvisited action).
struct ActionContext {
    int n_actions = 0;
    std::function<double(ActionId)> q_value;
    std::function<bool(ActionId)> visited;
    std::function<long(ActionId)> count_sa;
    long count_s = 0;
    bool has_q_source = true;
    const std::vector<double>* policy_probs = nullptr;
    long decay_step = 0;
};

/// q + c * sqrt(ln(n_parent) / n_child); +infinity when n_child == 0 so
/// unvisited actions are expanded first.
double ucb_score(double q, long n_parent, long n_child, double c);

/// Numerically stabilized softmax of q / temperature.
std::vector<double> boltzmann_probs(const std::vector<double>& q, double temperature);

/// beta / sqrt(1 + n).
double novelty_bonus(long n_sa, double beta);

ActionId select_action(const SelectionRule& rule, Phase phase, const ActionContext& ctx, Rng& rng);

/// Sample one successor from a distribution, or signal that the engine should
/// enumerate every child (Ordered, descriptive access only).
struct NextStateChoice {
    bool all_children = false;
    StateId next = -1;
    double reward = 0.0;
};

NextStateChoice select_next_state(NextStateKind kind, const QueryResult& result, Rng& rng);

} // namespace frap

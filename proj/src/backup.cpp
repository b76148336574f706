#include "frap/backup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace frap {

double bootstrap_state(const BootstrapFn& fn, StateId s, bool terminal, const GlobalSolution* g) {
    if (terminal) return 0.0; // terminal value is 0 by definition
    switch (fn.kind) {
        case BootstrapKind::None:
        case BootstrapKind::Zero: return 0.0;
        case BootstrapKind::Heuristic:
            if (!fn.h_state) throw MissingHeuristicEntry("no state heuristic provided");
            return fn.h_state(s);
        case BootstrapKind::LearnedGlobal:
            if (fn.table == LearnedTable::V) return g->v[s];
            // Bootstrapping a state from a Q table takes the greedy value.
            {
                double best = g->q_at(s, 0);
                for (ActionId a = 1; a < g->n_actions; ++a) best = std::max(best, g->q_at(s, a));
                return best;
            }
    }
    return 0.0;
}

double bootstrap_state_action(const BootstrapFn& fn, StateId s, ActionId a, bool terminal,
                              const GlobalSolution* g) {
    if (terminal) return 0.0;
    switch (fn.kind) {
        case BootstrapKind::None:
        case BootstrapKind::Zero: return 0.0;
        case BootstrapKind::Heuristic:
            if (fn.h_state_action) return fn.h_state_action(s, a);
            if (fn.h_state) return fn.h_state(s);
            throw MissingHeuristicEntry("no state-action heuristic provided");
        case BootstrapKind::LearnedGlobal:
            if (fn.table == LearnedTable::Q) return g->q_at(s, a);
            return g->v[s];
    }
    return 0.0;
}

double policy_backup(PolicyBackupKind kind, const std::map<ActionId, double>& q_children,
                     std::optional<ActionId> chosen,
                     const std::map<ActionId, double>* policy_probs) {
    switch (kind) {
        case PolicyBackupKind::OnPolicySample: {
            if (!chosen) throw MissingChild("sample policy back-up without a chosen action");
            auto it = q_children.find(*chosen);
            if (it == q_children.end())
                throw MissingChild("no value for chosen action " + std::to_string(*chosen));
            return it->second;
        }
        case PolicyBackupKind::Expected: {
            if (!policy_probs) throw MissingChild("expected policy back-up without a policy");
            double mass = 0.0, value = 0.0;
            for (const auto& [a, p] : *policy_probs) {
                if (p == 0.0) continue;
                auto it = q_children.find(a);
                if (it == q_children.end())
                    throw MissingChild("policy puts mass on unvalued action " + std::to_string(a));
                value += p * it->second;
                mass += p;
            }
            if (std::abs(mass - 1.0) > 1e-9)
                throw MissingChild("policy probabilities sum to " + std::to_string(mass));
            return value;
        }
        case PolicyBackupKind::GreedyMax: {
            if (q_children.empty()) throw MissingChild("greedy back-up over no children");
            double best = q_children.begin()->second;
            for (const auto& [a, q] : q_children)
                if (q > best) best = q;
            return best;
        }
    }
    return 0.0;
}

double dynamics_backup_sample(double reward, double gamma, double next_value) {
    return reward + gamma * next_value;
}

double dynamics_backup_expected(const std::vector<WeightedSuccessor>& successors, double gamma) {
    if (successors.empty()) throw DistributionRequired("expected back-up over no successors");
    double value = 0.0;
    for (const auto& w : successors) value += w.prob * (w.reward + gamma * w.value);
    return value;
}

namespace {

struct GreedyStep {
    double q_best;
    ActionId a_best;
};

GreedyStep greedy_backup_at(StateId s, AccessHandle& handle, double gamma,
                            const ValueView& view) {
    const auto& mdp = handle.mdp();
    GreedyStep out{-std::numeric_limits<double>::infinity(), 0};
    for (ActionId a = 0; a < mdp.n_actions(); ++a) {
        const auto result = handle.query_descriptive(s, a);
        double q = 0.0;
        for (const auto& t : *result.distribution) {
            const double v = mdp.is_terminal(t.next) ? 0.0 : view.get(t.next);
            q += t.prob * (t.reward + gamma * v);
        }
        if (q > out.q_best) {
            out.q_best = q;
            out.a_best = a;
        }
    }
    return out;
}

} // namespace

bool check_solved(StateId s, AccessHandle& handle, double gamma, double tol, ValueView view) {
    if (handle.mode() != AccessMode::SettableDescriptive)
        throw WrongAccessMode("solved check requires descriptive access");
    const auto& mdp = handle.mdp();
    if (mdp.is_terminal(s)) {
        view.mark_solved(s);
        return true;
    }

    bool rv = true;
    std::vector<StateId> open{s};
    std::vector<StateId> closed;
    std::set<StateId> seen{s};

    while (!open.empty()) {
        const StateId cur = open.back();
        open.pop_back();
        closed.push_back(cur);

        const auto step = greedy_backup_at(cur, handle, gamma, view);
        if (std::abs(step.q_best - view.get(cur)) > tol) {
            rv = false;
            continue; // residual too high: do not expand below this state
        }
        for (const auto& t : mdp.transitions(cur, step.a_best)) {
            if (mdp.is_terminal(t.next) || view.is_solved(t.next)) continue;
            if (seen.insert(t.next).second) open.push_back(t.next);
        }
    }

    if (rv) {
        for (StateId c : closed) view.mark_solved(c);
    } else {
        // Classic labeled-RTDP repair: update the visited envelope in reverse
        // visit order so values keep improving toward the fixed point.
        for (auto it = closed.rbegin(); it != closed.rend(); ++it)
            view.set(*it, greedy_backup_at(*it, handle, gamma, view).q_best);
    }
    return rv;
}

std::vector<BackupEstimate> walk_back(
    TraceRecord& trace, const BackupOp& op, double gamma, double leaf_value, int n_actions,
    const std::function<double(StateId, ActionId)>* q_source,
    const std::function<std::vector<double>(StateId)>* policy) {
    const int depth = trace.depth;
    trace.bootstrap_value = leaf_value;
    trace.return_estimates.assign(static_cast<std::size_t>(depth) + 1, 0.0);
    trace.return_estimates[depth] = leaf_value;

    std::vector<BackupEstimate> estimates;
    estimates.reserve(2 * static_cast<std::size_t>(depth));

    double v_below = leaf_value;
    for (int t = depth - 1; t >= 0; --t) {
        const TraceStep& step = trace.steps[t];
        const double q_hat = dynamics_backup_sample(step.reward, gamma, v_below);

        std::map<ActionId, double> q_children{{step.action, q_hat}};
        std::map<ActionId, double> probs;
        if (op.policy != PolicyBackupKind::OnPolicySample && q_source) {
            // Untaken actions fall back to the provided source.
            for (ActionId a = 0; a < n_actions; ++a) {
                const double q = (*q_source)(step.state, a);
                if (!std::isnan(q)) q_children.emplace(a, q);
            }
        }
        if (op.policy == PolicyBackupKind::Expected && policy) {
            const auto p = (*policy)(step.state);
            for (std::size_t a = 0; a < p.size(); ++a) probs[static_cast<ActionId>(a)] = p[a];
        }
        const double v_hat =
            policy_backup(op.policy, q_children, step.action,
                          op.policy == PolicyBackupKind::Expected ? &probs : nullptr);

        const int source_depth = depth - t;
        estimates.push_back({BackupEstimate::Kind::StateAction, step.state, step.action, q_hat,
                             source_depth});
        estimates.push_back({BackupEstimate::Kind::State, step.state, std::nullopt, v_hat,
                             source_depth});

        trace.return_estimates[t] = step.reward + gamma * trace.return_estimates[t + 1];
        v_below = v_hat;
    }
    return estimates;
}

} // namespace frap

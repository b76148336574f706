#pragma once

#include <map>
#include <set>
#include <vector>

#include "frap/control.hpp"
#include "frap/mdp.hpp"

namespace frap {

/// Maximum-likelihood tabular dynamics model learned from irreversible
/// experience, with the reverse map needed for backward root selection.
/// No smoothing: unvisited pairs are errors, not uniform priors, so the model
/// stays honest about its support.
class LearnedTabularModel {
public:
    LearnedTabularModel(int n_states, int n_actions);

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }

    void observe(StateId s, ActionId a, StateId next, double reward, bool terminal);

    long total(StateId s, ActionId a) const;
    bool visited(StateId s, ActionId a) const { return total(s, a) > 0; }
    bool state_known(StateId s) const;
    bool terminal_seen(StateId s) const { return terminals_seen_.count(s) > 0; }

    /// p-hat(s'|s,a) = counts/total, r-hat = running mean per (s,a,s').
    /// Throws UnvisitedPair when total(s,a) == 0.
    std::vector<Transition> estimate(StateId s, ActionId a) const;

    /// All (s,a) observed to lead into `next`, with their estimated
    /// probability of doing so.
    std::vector<Predecessor> predecessors(StateId next) const;

    const std::set<StateId>& terminals_seen() const { return terminals_seen_; }

    /// Render the learned model in the MDP text format (approximate: only the
    /// observed support, probabilities normalized per (s,a)).
    std::string dump() const;

private:
    struct Edge {
        long count = 0;
        double reward_sum = 0.0;
    };

    int n_states_;
    int n_actions_;
    std::vector<std::map<StateId, Edge>> edges_; // indexed by (s,a)
    std::vector<long> totals_;
    std::vector<std::set<std::pair<StateId, ActionId>>> reverse_;
    std::set<StateId> terminals_seen_;

    std::size_t index(StateId s, ActionId a) const {
        return static_cast<std::size_t>(s) * n_actions_ + a;
    }
};

/// Descriptive view over the learned model: a planner can query it in any
/// order. UnvisitedPair surfaces to the engine, which treats it as frontier.
class ModelHandle {
public:
    explicit ModelHandle(const LearnedTabularModel& model) : model_(&model) {}

    QueryResult query_descriptive(StateId s, ActionId a) const {
        QueryResult out;
        out.distribution = model_->estimate(s, a);
        return out;
    }

    const LearnedTabularModel& model() const { return *model_; }

private:
    const LearnedTabularModel* model_;
};

} // namespace frap

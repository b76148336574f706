#pragma once

#include <functional>
#include <map>
#include <set>
#include <vector>

#include "frap/mdp.hpp"

namespace frap {

enum class RootKind { Ordered, ForwardSampling, BackwardSampling, VisitedSet };
enum class VisitedSampling { Uniform, Recency };

/// Max-priority queue of unique states, popped in nonincreasing priority
/// order (ties to the lowest state index). Priorities combine by max.
class PriorityQueue {
public:
    explicit PriorityQueue(double threshold) : threshold_(threshold) {}

    double threshold() const { return threshold_; }
    bool empty() const { return ordered_.empty(); }
    std::size_t size() const { return ordered_.size(); }

    /// Insert or raise; entries at or below the threshold are dropped.
    void push(StateId s, double priority);
    StateId pop();
    double priority_of(StateId s) const;

private:
    double threshold_;
    std::map<StateId, double> current_;
    // (-priority, state): begin() is the max-priority, lowest-index entry.
    std::set<std::pair<double, StateId>> ordered_;
};

struct RootStrategy {
    RootKind kind = RootKind::Ordered;

    // Ordered
    int cursor = 0;

    // ForwardSampling: the engine executes the next-root action; this struct
    // only remembers the resulting state.
    StateId forward_state = -1;

    // BackwardSampling
    double priority_threshold = 1e-5;
    std::optional<PriorityQueue> queue;

    // VisitedSet
    VisitedSampling sampling = VisitedSampling::Uniform;
    std::vector<StateId> visited_order;
    std::set<StateId> visited_set;

    static RootStrategy ordered() {
        RootStrategy r;
        r.kind = RootKind::Ordered;
        return r;
    }
    static RootStrategy forward() {
        RootStrategy r;
        r.kind = RootKind::ForwardSampling;
        return r;
    }
    static RootStrategy backward(double threshold);
    static RootStrategy visited(VisitedSampling sampling);

    void note_visited(StateId s);
};

struct Predecessor {
    StateId s;
    ActionId a;
    double prob; // probability of reaching the changed state from (s, a)
};

/// Spread a value change of magnitude `delta` to the predecessors of the
/// changed state: each (s_prev, a) gets priority max(existing, prob * delta).
void push_priority(RootStrategy& strategy, double delta,
                   const std::vector<Predecessor>& predecessors);

struct TrialBudget {
    enum class Kind { FixedTrials, UntilConvergence, Exhaustive };
    Kind kind = Kind::FixedTrials;
    long n = 1;          // FixedTrials
    double tol = 1e-6;   // UntilConvergence
    long cap = 0;        // Exhaustive; 0 = one trial per action

    static TrialBudget fixed(long n) { return {Kind::FixedTrials, n, 0.0, 0}; }
    static TrialBudget until_convergence(double tol, long cap = 100000) {
        return {Kind::UntilConvergence, cap, tol, 0};
    }
    static TrialBudget exhaustive(long cap = 0) { return {Kind::Exhaustive, 0, 0.0, cap}; }
};

/// FixedTrials: trials_done < n. UntilConvergence: at least one trial, then
/// residual > tol (n acts as a hard cap). Exhaustive: trials_done < cap.
bool trials_remaining(const TrialBudget& budget, long trials_done, double residual);

struct DepthRule {
    enum class Kind { Fixed, Infinite, AdaptiveFrontier, AdaptiveDuplicate };
    Kind kind = Kind::Fixed;
    int n = 1;            // Fixed
    int horizon_cap = 0;  // Infinite / rollout cap; 0 = 10 * n_states

    static DepthRule fixed(int n) { return {Kind::Fixed, n, 0}; }
    static DepthRule infinite(int cap = 0) { return {Kind::Infinite, 1, cap}; }
    static DepthRule adaptive_frontier(int cap = 0) { return {Kind::AdaptiveFrontier, 1, cap}; }
    static DepthRule adaptive_duplicate(int cap = 0) { return {Kind::AdaptiveDuplicate, 1, cap}; }
};

/// Whether the stored part of a trial ends at the current point.
///   beyond_expansion  - a frontier node was already expanded this trial
///   duplicate         - current state is explored or repeats within the trial
bool depth_reached(const DepthRule& rule, int depth_so_far, int horizon_cap,
                   bool beyond_expansion, bool duplicate);

} // namespace frap

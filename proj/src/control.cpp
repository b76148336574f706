#include "frap/control.hpp"

#include <algorithm>

namespace frap {

void PriorityQueue::push(StateId s, double priority) {
    if (priority <= threshold_) return;
    auto it = current_.find(s);
    if (it != current_.end()) {
        if (priority <= it->second) return; // keep the larger existing priority
        ordered_.erase({-it->second, s});
        it->second = priority;
    } else {
        current_[s] = priority;
    }
    ordered_.insert({-priority, s});
}

StateId PriorityQueue::pop() {
    const auto top = *ordered_.begin();
    ordered_.erase(ordered_.begin());
    current_.erase(top.second);
    return top.second;
}

double PriorityQueue::priority_of(StateId s) const {
    auto it = current_.find(s);
    return it == current_.end() ? 0.0 : it->second;
}

RootStrategy RootStrategy::backward(double threshold) {
    RootStrategy r;
    r.kind = RootKind::BackwardSampling;
    r.priority_threshold = threshold;
    r.queue.emplace(threshold);
    return r;
}

RootStrategy RootStrategy::visited(VisitedSampling sampling) {
    RootStrategy r;
    r.kind = RootKind::VisitedSet;
    r.sampling = sampling;
    return r;
}

void RootStrategy::note_visited(StateId s) {
    if (visited_set.insert(s).second) visited_order.push_back(s);
}

void push_priority(RootStrategy& strategy, double delta,
                   const std::vector<Predecessor>& predecessors) {
    if (strategy.kind != RootKind::BackwardSampling || !strategy.queue) return;
    for (const auto& pred : predecessors) strategy.queue->push(pred.s, pred.prob * delta);
}

bool trials_remaining(const TrialBudget& budget, long trials_done, double residual) {
    switch (budget.kind) {
        case TrialBudget::Kind::FixedTrials: return trials_done < budget.n;
        case TrialBudget::Kind::UntilConvergence:
            if (trials_done == 0) return true;
            if (budget.n > 0 && trials_done >= budget.n) return false;
            return residual > budget.tol;
        case TrialBudget::Kind::Exhaustive: return trials_done < budget.cap;
    }
    return false;
}

bool depth_reached(const DepthRule& rule, int depth_so_far, int horizon_cap,
                   bool beyond_expansion, bool duplicate) {
    if (horizon_cap > 0 && depth_so_far >= horizon_cap) return true;
    switch (rule.kind) {
        case DepthRule::Kind::Fixed: return depth_so_far >= rule.n;
        case DepthRule::Kind::Infinite: return false; // the cap above ends it
        case DepthRule::Kind::AdaptiveFrontier: return beyond_expansion;
        case DepthRule::Kind::AdaptiveDuplicate: return duplicate;
    }
    return false;
}

} // namespace frap

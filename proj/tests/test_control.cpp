#include "doctest.h"
#include "frap/control.hpp"
#include "test_envs.hpp"

using namespace frap;

TEST_CASE("priority queue: max pop, dedup, threshold, max-combining") {
    PriorityQueue q(1e-5);
    q.push(3, 0.5);
    q.push(1, 0.9);
    CHECK(q.size() == 2);
    CHECK(q.pop() == 1);
    CHECK(q.pop() == 3);
    CHECK(q.empty());

    // Below-threshold pushes are dropped.
    q.push(2, 1e-6);
    CHECK(q.empty());

    // Re-push with a smaller priority keeps the larger existing one.
    q.push(4, 0.8);
    q.push(4, 0.2);
    CHECK(q.size() == 1);
    CHECK(q.priority_of(4) == 0.8);

    // Raising reorders.
    q.push(5, 0.1);
    q.push(5, 0.95);
    CHECK(q.pop() == 5);
}

TEST_CASE("priority queue pops in nonincreasing priority order without duplicates") {
    PriorityQueue q(0.0);
    Rng rng(21);
    std::map<StateId, double> expected;
    for (int i = 0; i < 200; ++i) {
        const StateId s = rng.index(50);
        const double p = rng.uniform() + 1e-9;
        q.push(s, p);
        auto [it, fresh] = expected.emplace(s, p);
        if (!fresh) it->second = std::max(it->second, p);
    }
    CHECK(q.size() == expected.size());
    double last = 1e18;
    std::set<StateId> seen;
    while (!q.empty()) {
        const StateId s = q.pop();
        CHECK(seen.insert(s).second); // no duplicates
        CHECK(expected.at(s) <= last);
        last = expected.at(s);
    }
}

TEST_CASE("push_priority scales deltas by the reverse-transition probability") {
    auto strategy = RootStrategy::backward(1e-5);
    push_priority(strategy, 1.0, {{7, 0, 1.0}});
    CHECK(strategy.queue->priority_of(7) == 1.0);

    // Below-threshold product leaves the queue unchanged.
    push_priority(strategy, 1e-6, {{8, 0, 1.0}});
    CHECK(strategy.queue->priority_of(8) == 0.0);

    // Max-combining across pushes.
    push_priority(strategy, 0.5, {{7, 1, 0.5}});
    CHECK(strategy.queue->priority_of(7) == 1.0);
}

TEST_CASE("trial budgets") {
    CHECK_FALSE(trials_remaining(TrialBudget::fixed(1), 1, 0.0));
    CHECK(trials_remaining(TrialBudget::fixed(1), 0, 0.0));

    const auto conv = TrialBudget::until_convergence(1e-6);
    CHECK(trials_remaining(conv, 0, 1e9));       // must run at least once
    CHECK(trials_remaining(conv, 3, 1e-3));      // still above tolerance
    CHECK_FALSE(trials_remaining(conv, 3, 1e-7)); // converged

    CHECK(trials_remaining(TrialBudget::exhaustive(4), 3, 0.0));
    CHECK_FALSE(trials_remaining(TrialBudget::exhaustive(4), 4, 0.0));
}

TEST_CASE("depth rules") {
    CHECK(depth_reached(DepthRule::fixed(1), 1, 100, false, false));
    CHECK_FALSE(depth_reached(DepthRule::fixed(1), 0, 100, false, false));
    CHECK_FALSE(depth_reached(DepthRule::fixed(3), 2, 100, false, false));

    // Infinite depth only ends at the horizon cap.
    CHECK_FALSE(depth_reached(DepthRule::infinite(), 99, 100, false, false));
    CHECK(depth_reached(DepthRule::infinite(), 100, 100, false, false));

    // Frontier rule fires once the trial expanded a node.
    CHECK(depth_reached(DepthRule::adaptive_frontier(), 1, 100, true, false));
    CHECK_FALSE(depth_reached(DepthRule::adaptive_frontier(), 1, 100, false, false));

    // Duplicate rule fires on explored or repeated states.
    CHECK(depth_reached(DepthRule::adaptive_duplicate(), 1, 100, false, true));
    CHECK_FALSE(depth_reached(DepthRule::adaptive_duplicate(), 1, 100, false, false));
}

TEST_CASE("visited-set bookkeeping dedups and keeps order") {
    auto strategy = RootStrategy::visited(VisitedSampling::Uniform);
    strategy.note_visited(3);
    strategy.note_visited(1);
    strategy.note_visited(3);
    strategy.note_visited(2);
    CHECK(strategy.visited_order == std::vector<StateId>{3, 1, 2});
}

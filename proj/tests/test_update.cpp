#include <cmath>

#include "doctest.h"
#include "frap/engine.hpp"
#include "frap/oracle.hpp"
#include "frap/rng.hpp"
#include "frap/update.hpp"
#include "test_envs.hpp"

using namespace frap;

TEST_CASE("local update rules: replace, average, and eligibility") {
    CHECK(local_update(LocalUpdateRule::replace(), 5.0, 2.0, 1, 1) == 2.0);

    // Running mean: targets 1.0 then 3.0 from 0.
    double v = local_update(LocalUpdateRule::average(), 0.0, 1.0, 1, 1);
    CHECK(v == 1.0);
    v = local_update(LocalUpdateRule::average(), v, 3.0, 2, 1);
    CHECK(v == 2.0);

    CHECK(local_update(LocalUpdateRule::eligibility(0.5), 0.0, 4.0, 1, 1) == 2.0);
}

TEST_CASE("replace equals step(1) and average(n) equals step(1/n) exactly") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const double old_v = rng.uniform() * 10.0 - 5.0;
        const double target = rng.uniform() * 10.0 - 5.0;
        const long n = 1 + rng.index(50);
        CHECK(local_update(LocalUpdateRule::replace(), old_v, target, n, 1) ==
              local_update(LocalUpdateRule::step(1.0), old_v, target, n, 1));
        CHECK(local_update(LocalUpdateRule::average(), old_v, target, n, 1) ==
              local_update(LocalUpdateRule::step(1.0 / static_cast<double>(n)), old_v, target, n,
                           1));
    }
}

TEST_CASE("eligibility weights cover the horizon and normalize with the tail") {
    for (double lambda : {0.1, 0.5, 0.9}) {
        const int horizon = static_cast<int>(std::ceil(std::log(1e-6) / std::log(lambda)));
        double raw_sum = 0.0;
        for (int d = 1; d <= horizon; ++d) raw_sum += (1.0 - lambda) * std::pow(lambda, d - 1);
        CHECK(raw_sum >= 1.0 - 1e-6);

        const auto weights = eligibility_weights(lambda, horizon);
        double total = 0.0;
        for (double w : weights) total += w;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    // lambda = 0 collapses to the one-step target.
    const auto w0 = eligibility_weights(0.0, 5);
    CHECK(w0[0] == 1.0);
    for (std::size_t d = 1; d < w0.size(); ++d) CHECK(w0[d] == 0.0);
}

TEST_CASE("learning-rate schedules") {
    CHECK(decay_learning_rate(EtaSchedule::Constant, 0.1, 100.0, 12345) == 0.1);
    CHECK(decay_learning_rate(EtaSchedule::Harmonic, 0.1, 100.0, 0) == 0.1);

    // Harmonic partial sums keep growing (divergent-series check).
    auto partial = [](long steps) {
        double sum = 0.0;
        for (long t = 0; t < steps; ++t)
            sum += decay_learning_rate(EtaSchedule::Harmonic, 0.1, 100.0, t);
        return sum;
    };
    const double s4 = partial(10000);
    const double s5 = partial(100000);
    const double s6 = partial(1000000);
    CHECK(s5 > s4 + 10.0);
    CHECK(s6 > s5 + 20.0);
}

TEST_CASE("global tabular update moves entries toward the target") {
    GlobalSolution g = init_global({SolutionCoverage::Global, SolutionType::Q, {}}, 3, 2);
    const auto rule = GlobalUpdateRule::tabular_step(0.1);
    global_tabular_update(rule, g, 0, 1, 1.0, 0.1);
    CHECK(g.q_at(0, 1) == doctest::Approx(0.1).epsilon(1e-15));

    // eta = 1 replaces.
    global_tabular_update(rule, g, 0, 1, 5.0, 1.0);
    CHECK(g.q_at(0, 1) == 5.0);

    // Repeated fixed-target updates contract geometrically.
    double expected_gap = std::abs(g.q_at(0, 1) - 2.0);
    for (int i = 0; i < 50; ++i) {
        global_tabular_update(rule, g, 0, 1, 2.0, 0.1);
        const double gap = std::abs(g.q_at(0, 1) - 2.0);
        CHECK(gap == doctest::Approx(expected_gap * 0.9).epsilon(1e-12));
        expected_gap = gap;
    }
}

TEST_CASE("policy gradient: one-hot-minus-probabilities at uniform logits") {
    GlobalSolution g = init_global({SolutionCoverage::Global, SolutionType::Policy, {}}, 1, 2);
    TraceRecord trace;
    trace.steps.push_back({0, 0, 1.0, 0});
    trace.depth = 1;
    trace.return_estimates = {1.0, 0.0};
    policy_gradient_update(GlobalUpdateRule::policy_gradient(1.0), g, trace, 1.0);
    CHECK(g.logit_at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g.logit_at(0, 1) == doctest::Approx(-0.5).epsilon(1e-12));

    // Zero returns leave the logits untouched.
    GlobalSolution g2 = init_global({SolutionCoverage::Global, SolutionType::Policy, {}}, 1, 2);
    TraceRecord zero = trace;
    zero.return_estimates = {0.0, 0.0};
    policy_gradient_update(GlobalUpdateRule::policy_gradient(1.0), g2, zero, 1.0);
    CHECK(g2.logit_at(0, 0) == 0.0);
    CHECK(g2.logit_at(0, 1) == 0.0);

    CHECK_THROWS_AS(
        policy_gradient_update(GlobalUpdateRule::policy_gradient(1.0), g, TraceRecord{}, 1.0),
        MissingReturns);
}

TEST_CASE("the value-table baseline shifts the gradient advantage") {
    GlobalSolution g =
        init_global({SolutionCoverage::Global, SolutionType::ActorCritic, {}}, 1, 2);
    g.v[0] = 1.0; // baseline equals the return: zero advantage, no movement
    TraceRecord trace;
    trace.steps.push_back({0, 0, 1.0, 0});
    trace.depth = 1;
    trace.return_estimates = {1.0, 0.0};
    policy_gradient_update(GlobalUpdateRule::policy_gradient(1.0, true), g, trace, 1.0);
    CHECK(g.logit_at(0, 0) == 0.0);
    CHECK(g.logit_at(0, 1) == 0.0);
}

TEST_CASE("softmax policies stay normalized after gradient updates") {
    GlobalSolution g = init_global({SolutionCoverage::Global, SolutionType::Policy, {}}, 2, 3);
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        TraceRecord trace;
        trace.steps.push_back({0, rng.index(3), 1.0, 1});
        trace.depth = 1;
        trace.return_estimates = {rng.uniform() * 4.0 - 2.0, 0.0};
        policy_gradient_update(GlobalUpdateRule::policy_gradient(0.5), g, trace, 0.5);
        const auto probs = g.policy_probs(0);
        double total = 0.0;
        for (double p : probs) {
            CHECK(std::isfinite(p));
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

#include <cmath>

#include "doctest.h"
#include "frap/oracle.hpp"
#include "test_envs.hpp"

using namespace frap;

TEST_CASE("value iteration solves the chain exactly") {
    auto mdp = test::chain3();
    const auto truth = oracle::value_iteration(mdp, 1e-12);
    CHECK(truth.v_star[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(truth.v_star[0] == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(truth.v_star[2] == 0.0);
    CHECK(truth.optimal_actions[0] == std::vector<ActionId>{1});
    CHECK(truth.optimal_actions[1] == std::vector<ActionId>{1});
}

TEST_CASE("all-terminal problems converge in one sweep") {
    TabularMdp mdp(2, 1, 0.9);
    mdp.set_terminal(0);
    mdp.set_terminal(1);
    mdp.add_initial(0, 1.0);
    mdp.validate();
    const auto truth = oracle::value_iteration(mdp, 1e-12);
    CHECK(truth.iterations == 1);
    CHECK(truth.v_star == std::vector<double>{0.0, 0.0});
}

TEST_CASE("gamma = 0 is the myopic maximum expected reward") {
    auto split = load_mdp_string("mdp 3 1 0\ninitial 0 1\nterminal 1\nterminal 2\n"
                                 "t 0 0 1 0.5 1\nt 0 0 2 0.5 3\n");
    const auto truth = oracle::value_iteration(split, 1e-12);
    CHECK(truth.v_star[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("q_star is one exact Bellman application of v_star") {
    auto mdp = test::gridworld5();
    const auto truth = oracle::value_iteration(mdp, 1e-10);
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        if (mdp.is_terminal(s)) continue;
        for (ActionId a = 0; a < mdp.n_actions(); ++a) {
            double q = 0.0;
            for (const auto& t : mdp.transitions(s, a))
                q += t.prob * (t.reward + mdp.gamma() * truth.v_star[t.next]);
            CHECK(std::abs(q - truth.q_at(s, a, mdp.n_actions())) <= 1e-12);
        }
    }
}

TEST_CASE("sweeps are monotone from zero init when rewards are nonnegative") {
    auto mdp = test::gridworld5();
    const auto sweeps = oracle::value_iteration_sweeps(mdp, 50);
    for (std::size_t k = 1; k < sweeps.size(); ++k)
        for (StateId s = 0; s < mdp.n_states(); ++s)
            CHECK(sweeps[k][s] >= sweeps[k - 1][s] - 1e-15);
}

TEST_CASE("policy evaluation matches the closed-form uniform-policy solve") {
    auto mdp = test::chain3();
    std::vector<std::vector<double>> uniform(3, {0.5, 0.5});
    const auto v = oracle::policy_evaluation(mdp, uniform, 1e-12);
    // V(1) = 0.5*(1) + 0.5*0.9*V(1)  =>  V(1) = 10/11
    // V(0) = 0.5*0.9*V(1) + 0.5*0.9*V(0)  =>  V(0) = (9/11)*V(1)
    const double v1 = 0.5 / (1.0 - 0.45);
    const double v0 = 0.45 * v1 / 0.55;
    CHECK(v[1] == doctest::Approx(v1).epsilon(1e-9));
    CHECK(v[0] == doctest::Approx(v0).epsilon(1e-9));
    CHECK(v[2] == 0.0);
}

TEST_CASE("policy evaluation of the greedy-optimal policy reaches v_star") {
    auto mdp = test::chain3();
    const auto truth = oracle::value_iteration(mdp, 1e-12);
    std::vector<std::vector<double>> greedy(3, {0.0, 1.0});
    const auto v = oracle::policy_evaluation(mdp, greedy, 1e-12);
    for (StateId s = 0; s < 3; ++s) CHECK(std::abs(v[s] - truth.v_star[s]) <= 2e-12);
}

TEST_CASE("policy evaluation on a terminal-only problem is zero") {
    TabularMdp mdp(1, 1, 0.9);
    mdp.set_terminal(0);
    mdp.add_initial(0, 1.0);
    mdp.validate();
    const auto v = oracle::policy_evaluation(mdp, {{1.0}}, 1e-12);
    CHECK(v[0] == 0.0);
}

TEST_CASE("monte carlo returns: deterministic episode is exact") {
    auto mdp = test::chain3();
    std::vector<std::vector<double>> right(3, {0.0, 1.0});
    const auto est = oracle::mc_return(mdp, right, 0, 50, 7);
    CHECK(est.mean == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(est.stderr_ == 0.0);
}

TEST_CASE("monte carlo returns agree with policy evaluation within 4 stderr") {
    auto mdp = test::gridworld5();
    std::vector<std::vector<double>> uniform(
        static_cast<std::size_t>(mdp.n_states()),
        std::vector<double>(mdp.n_actions(), 1.0 / mdp.n_actions()));
    const auto v = oracle::policy_evaluation(mdp, uniform, 1e-10);
    const auto est = oracle::mc_return(mdp, uniform, 0, 10000, 13, 400);
    CHECK(std::abs(est.mean - v[0]) <= 4.0 * est.stderr_ + 1e-3);
}

TEST_CASE("single-episode estimates report zero stderr") {
    auto mdp = test::chain3();
    std::vector<std::vector<double>> right(3, {0.0, 1.0});
    const auto est = oracle::mc_return(mdp, right, 0, 1, 3);
    CHECK(est.episodes == 1);
    CHECK(est.stderr_ == 0.0);
}

TEST_CASE("a 2x2 deterministic gridworld has start value gamma^1") {
    auto mdp = make_gridworld(2, 2, {}, {1, 1}, 0.0, 0.0, 1.0, 0.95);
    const auto truth = oracle::value_iteration(mdp, 1e-12);
    CHECK(truth.v_star[0] == doctest::Approx(0.95).epsilon(1e-9));
}

TEST_CASE("value iteration reports non-convergence past the iteration cap") {
    // gamma = 1 with no terminal state and positive rewards diverges.
    TabularMdp mdp(2, 1, 1.0);
    mdp.add_transition(0, 0, 1, 1.0, 1.0);
    mdp.add_transition(1, 0, 0, 1.0, 1.0);
    mdp.add_initial(0, 1.0);
    mdp.validate();
    CHECK_THROWS_AS(oracle::value_iteration(mdp, 1e-9, 500), NonConvergent);
}

TEST_CASE("the SSP racetrack solves under gamma = 1") {
    auto mdp = test::racetrack();
    const auto truth = oracle::value_iteration(mdp, 1e-9);
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        if (mdp.is_terminal(s)) continue;
        CHECK(truth.v_star[s] < 0.0);
        CHECK(truth.v_star[s] > -100.0);
    }
}

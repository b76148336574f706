"""Python smoke tests for the bound module (run via ctest with PYTHONPATH set
to the build tree and the python/ package directory)."""

import math

import frap


def test_mdp_roundtrip():
    chain = frap.make_chain(3, 0.9)
    assert chain.n_states == 3
    assert chain.n_actions == 2
    assert chain.is_terminal(2)
    text = chain.emit()
    reloaded = frap.load_mdp(text)
    assert reloaded.emit() == text
    assert reloaded.transitions(1, 1) == [(2, 1.0, 1.0)]


def test_access_modes():
    chain = frap.make_chain(3, 0.9)
    handle = frap.AccessHandle(chain, frap.AccessMode.RESETTABLE_GENERATIVE, seed=7)
    assert handle.reset() == 0
    state, reward, terminal = handle.step(1)
    assert (state, reward, terminal) == (1, 0.0, False)
    try:
        handle.query_descriptive(0, 1)
    except frap.FrapError as err:
        assert "WrongAccessMode" in str(err)
    else:
        raise AssertionError("descriptive query should be rejected")


def test_oracle_matches_hand_values():
    chain = frap.make_chain(3, 0.9)
    truth = frap.oracle_value_iteration(chain, tol=1e-12)
    assert abs(truth["v_star"][0] - 0.9) < 1e-9
    assert abs(truth["v_star"][1] - 1.0) < 1e-9
    assert truth["v_star"][2] == 0.0
    assert truth["optimal_policy"][0] == [1]


def test_value_iteration_preset_agrees_with_oracle():
    grid = frap.make_gridworld(4, 4, walls=[], goal=(3, 3), slip=0.1,
                               step_reward=0.0, goal_reward=1.0, gamma=0.95)
    truth = frap.oracle_value_iteration(grid, tol=1e-10)
    result = frap.run_preset(grid, "value_iteration", roots=0, seed=1)
    assert result["converged"]
    worst = max(abs(a - b) for a, b in zip(result["v"], truth["v_star"]))
    assert worst <= 1e-5


def test_mcts_recommends_the_optimal_action():
    chain = frap.make_chain(3, 0.9)
    result = frap.run_preset(chain, "mcts", roots=1, seed=3)
    assert result["recommendation"] == 1


def test_q_learning_learns_the_chain():
    chain = frap.make_chain(5, 0.9)
    result = frap.run_preset(chain, "q_learning", roots=20000, seed=5)
    truth = frap.oracle_value_iteration(chain)
    for s in range(chain.n_states - 1):
        assert result["greedy_policy"][s] in truth["optimal_policy"][s]


def test_runs_are_deterministic():
    chain = frap.make_chain(5, 0.9)
    a = frap.run_preset(chain, "q_learning", roots=1000, seed=11)
    b = frap.run_preset(chain, "q_learning", roots=1000, seed=11)
    assert a["metrics_csv"] == b["metrics_csv"]
    assert a["q"] == b["q"]


def test_config_overrides():
    chain = frap.make_chain(3, 0.9)
    result = frap.run_config(chain, "preset = q_learning\nselect.eps = 0.5\n",
                             roots=100, seed=2)
    assert result["queries"] == 100
    echo = frap.config_echo("preset = q_learning\nselect.eps = 0.5\n")
    assert "select.eps = 0.5" in echo


def test_policy_evaluation_and_mc_agree():
    chain = frap.make_chain(3, 0.9)
    uniform = [[0.5, 0.5]] * 3
    v = frap.oracle_policy_evaluation(chain, uniform, tol=1e-12)
    mean, stderr = frap.oracle_mc_return(chain, uniform, s0=0, episodes=20000, seed=9)
    assert abs(mean - v[0]) <= 4.0 * stderr + 1e-3
    assert math.isfinite(stderr)


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"{name}: ok")
            except AssertionError as err:
                print(f"{name}: FAIL {err}")
                failures += 1
    raise SystemExit(1 if failures else 0)

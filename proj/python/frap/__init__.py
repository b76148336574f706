"""Composable tabular MDP planning and reinforcement-learning engine."""

from _frap import (  # noqa: F401
    AccessHandle,
    AccessMode,
    FrapError,
    TabularMdp,
    builtin_names,
    config_echo,
    emit_mdp,
    load_mdp,
    load_mdp_file,
    make_builtin,
    make_chain,
    make_gridworld,
    make_ssp_racetrack_small,
    oracle_mc_return,
    oracle_policy_evaluation,
    oracle_value_iteration,
    preset_names,
    run_config,
    run_preset,
)

__all__ = [
    "AccessHandle",
    "AccessMode",
    "FrapError",
    "TabularMdp",
    "builtin_names",
    "config_echo",
    "emit_mdp",
    "load_mdp",
    "load_mdp_file",
    "make_builtin",
    "make_chain",
    "make_gridworld",
    "make_ssp_racetrack_small",
    "oracle_mc_return",
    "oracle_policy_evaluation",
    "oracle_value_iteration",
    "preset_names",
    "run_config",
    "run_preset",
]

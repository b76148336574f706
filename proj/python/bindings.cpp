#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "frap/engine.hpp"
#include "frap/harness.hpp"
#include "frap/metrics.hpp"
#include "frap/oracle.hpp"

namespace py = pybind11;
using namespace frap;

namespace {

py::dict oracle_dict(const oracle::OracleResult& truth, const TabularMdp& mdp) {
    py::dict out;
    out["v_star"] = truth.v_star;
    std::vector<std::vector<double>> q(static_cast<std::size_t>(mdp.n_states()));
    for (StateId s = 0; s < mdp.n_states(); ++s)
        for (ActionId a = 0; a < mdp.n_actions(); ++a)
            q[s].push_back(truth.q_at(s, a, mdp.n_actions()));
    out["q_star"] = q;
    out["optimal_policy"] = truth.optimal_actions;
    out["iterations"] = truth.iterations;
    out["residual"] = truth.residual;
    return out;
}

py::dict run_dict(const RunResult& result, const TabularMdp& mdp) {
    py::dict out;
    out["v"] = result.value_table();
    if (result.global.has_q) {
        std::vector<std::vector<double>> q(static_cast<std::size_t>(result.global.n_states));
        for (StateId s = 0; s < result.global.n_states; ++s)
            for (ActionId a = 0; a < result.global.n_actions; ++a)
                q[s].push_back(result.global.q_at(s, a));
        out["q"] = q;
    }
    if (result.global.has_policy) {
        std::vector<std::vector<double>> pi(static_cast<std::size_t>(result.global.n_states));
        for (StateId s = 0; s < result.global.n_states; ++s)
            pi[s] = result.global.policy_probs(s);
        out["policy"] = pi;
    }
    out["solved"] =
        std::vector<StateId>(result.global.solved.begin(), result.global.solved.end());
    out["queries"] = result.query_count;
    out["model_queries"] = result.model_query_count;
    out["iterations"] = result.outer_iterations;
    out["converged"] = result.converged;
    out["solved_root"] = result.solved_root;
    out["seed"] = result.seed;
    out["greedy_policy"] = harness::greedy_policy(result, mdp);
    out["metrics_csv"] = emit_metrics(result.roots, MetricsFormat::Csv);
    try {
        out["recommendation"] = result.final_local.recommend_action(
            result.final_local.root_key(), LocalSolution::Recommend::MaxCount);
    } catch (const NoVisitedChildren&) {
        out["recommendation"] = py::none();
    }
    return out;
}

RunResult run_with(const TabularMdp& mdp, AlgorithmConfig cfg, long roots, std::uint64_t seed) {
    AccessHandle handle(mdp, cfg.access_required, seed * 7919 + 13);
    return run(cfg, handle, roots, seed);
}

} // namespace

PYBIND11_MODULE(_frap, m) {
    m.doc() = "Composable tabular MDP planning and reinforcement-learning engine";

    py::register_exception<Error>(m, "FrapError");

    py::enum_<AccessMode>(m, "AccessMode")
        .value("SETTABLE_DESCRIPTIVE", AccessMode::SettableDescriptive)
        .value("SETTABLE_GENERATIVE", AccessMode::SettableGenerative)
        .value("RESETTABLE_GENERATIVE", AccessMode::ResettableGenerative);

    py::class_<TabularMdp>(m, "TabularMdp")
        .def_property_readonly("n_states", &TabularMdp::n_states)
        .def_property_readonly("n_actions", &TabularMdp::n_actions)
        .def_property_readonly("gamma", &TabularMdp::gamma)
        .def("is_terminal", &TabularMdp::is_terminal)
        .def("transitions",
             [](const TabularMdp& mdp, StateId s, ActionId a) {
                 std::vector<std::tuple<StateId, double, double>> out;
                 for (const auto& t : mdp.transitions(s, a))
                     out.emplace_back(t.next, t.prob, t.reward);
                 return out;
             })
        .def("initial_dist", &TabularMdp::initial_dist)
        .def("emit", [](const TabularMdp& mdp) { return emit_mdp(mdp); })
        .def("__repr__", [](const TabularMdp& mdp) {
            return "<TabularMdp states=" + std::to_string(mdp.n_states()) +
                   " actions=" + std::to_string(mdp.n_actions()) + ">";
        });

    py::class_<AccessHandle>(m, "AccessHandle")
        .def(py::init<const TabularMdp&, AccessMode, std::uint64_t>(), py::arg("mdp"),
             py::arg("mode"), py::arg("seed"), py::keep_alive<1, 2>())
        .def_property_readonly("mode", &AccessHandle::mode)
        .def_property_readonly("query_count", &AccessHandle::query_count)
        .def_property_readonly("current_state", &AccessHandle::current_state)
        .def("query_descriptive",
             [](AccessHandle& h, StateId s, ActionId a) {
                 std::vector<std::tuple<StateId, double, double>> out;
                 for (const auto& t : *h.query_descriptive(s, a).distribution)
                     out.emplace_back(t.next, t.prob, t.reward);
                 return out;
             })
        .def("query_generative",
             [](AccessHandle& h, StateId s, ActionId a) {
                 return *h.query_generative(s, a).sample;
             })
        .def("step", &AccessHandle::step)
        .def("reset", &AccessHandle::reset);

    m.def("load_mdp", [](const std::string& text) { return load_mdp_string(text); },
          "Parse the MDP text format");
    m.def("load_mdp_file", [](const std::string& path) { return load_mdp_file(path); });
    m.def("emit_mdp", [](const TabularMdp& mdp) { return emit_mdp(mdp); });
    m.def("make_chain", &make_chain, py::arg("n"), py::arg("gamma"));
    m.def(
        "make_gridworld",
        [](int width, int height, const std::vector<std::pair<int, int>>& walls,
           std::pair<int, int> goal, double slip, double step_reward, double goal_reward,
           double gamma) {
            std::set<Cell> wall_cells;
            for (const auto& [x, y] : walls) wall_cells.insert({x, y});
            return make_gridworld(width, height, wall_cells, {goal.first, goal.second}, slip,
                                  step_reward, goal_reward, gamma);
        },
        py::arg("width"), py::arg("height"), py::arg("walls"), py::arg("goal"), py::arg("slip"),
        py::arg("step_reward"), py::arg("goal_reward"), py::arg("gamma"));
    m.def("make_ssp_racetrack_small", &make_ssp_racetrack_small);
    m.def("make_builtin", &make_builtin);
    m.def("builtin_names", &builtin_names);

    m.def("preset_names", &preset_names);
    m.def(
        "run_preset",
        [](const TabularMdp& mdp, const std::string& name, long roots, std::uint64_t seed,
           const std::string& overrides) {
            auto cfg = parse_config("preset = " + name + "\n" + overrides);
            return run_dict(run_with(mdp, cfg, roots, seed), mdp);
        },
        py::arg("mdp"), py::arg("preset"), py::arg("roots") = 0, py::arg("seed") = 1,
        py::arg("overrides") = "");
    m.def(
        "run_config",
        [](const TabularMdp& mdp, const std::string& config_text, long roots,
           std::uint64_t seed) {
            auto cfg = parse_config(config_text);
            return run_dict(run_with(mdp, cfg, roots, seed), mdp);
        },
        py::arg("mdp"), py::arg("config"), py::arg("roots") = 0, py::arg("seed") = 1);
    m.def("config_echo",
          [](const std::string& config_text) { return config_echo(parse_config(config_text)); });

    m.def(
        "oracle_value_iteration",
        [](const TabularMdp& mdp, double tol) {
            return oracle_dict(oracle::value_iteration(mdp, tol), mdp);
        },
        py::arg("mdp"), py::arg("tol") = 1e-9);
    m.def(
        "oracle_policy_evaluation",
        [](const TabularMdp& mdp, const std::vector<std::vector<double>>& policy, double tol) {
            return oracle::policy_evaluation(mdp, policy, tol);
        },
        py::arg("mdp"), py::arg("policy"), py::arg("tol") = 1e-9);
    m.def(
        "oracle_mc_return",
        [](const TabularMdp& mdp, const std::vector<std::vector<double>>& policy, StateId s0,
           long episodes, std::uint64_t seed) {
            const auto est = oracle::mc_return(mdp, policy, s0, episodes, seed);
            return py::make_tuple(est.mean, est.stderr_);
        },
        py::arg("mdp"), py::arg("policy"), py::arg("s0"), py::arg("episodes"),
        py::arg("seed") = 1);
}

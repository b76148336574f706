#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "frap/engine.hpp"

namespace frap {

namespace {

constexpr double kAuto = std::numeric_limits<double>::quiet_NaN();

AlgorithmConfig base(const std::string& name) {
    AlgorithmConfig c;
    c.name = name;
    return c;
}

AlgorithmConfig make_value_iteration() {
    auto c = base("value_iteration");
    c.access_required = AccessMode::SettableDescriptive;
    c.solution = {SolutionCoverage::Global, SolutionType::V, {InitScheme::Kind::Uniform, 0.0}};
    c.root_kind = RootKind::Ordered;
    c.budget = TrialBudget::exhaustive();
    c.depth = DepthRule::fixed(1);
    c.select.bf = c.select.af = SelectKind::Ordered;
    c.next_state = NextStateKind::Ordered;
    c.bootstrap = BootstrapFn::learned(LearnedTable::V);
    c.backup = {PolicyBackupKind::GreedyMax, DynamicsBackupKind::Expected, {}};
    c.update_local = LocalUpdateRule::replace();
    c.update_global = GlobalUpdateRule::tabular_step(1.0);
    c.sync_sweep = true;
    c.outer_tol = 1e-6;
    c.default_root_budget = 1000000;
    return c;
}

AlgorithmConfig make_lao_star() {
    auto c = base("lao_star");
    c.access_required = AccessMode::SettableDescriptive;
    c.solution = {SolutionCoverage::Local, SolutionType::V, {InitScheme::Kind::Heuristic}};
    c.root_kind = RootKind::ForwardSampling;
    c.budget = TrialBudget::until_convergence(1e-6, 1000);
    c.depth = DepthRule::adaptive_frontier();
    c.select.bf = SelectKind::Greedy;
    c.select.af = SelectKind::Ordered;
    c.select.nr = SelectKind::Greedy;
    c.next_state = NextStateKind::Ordered;
    c.bootstrap = BootstrapFn::heuristic(nullptr, true); // default admissible bound
    c.backup = {PolicyBackupKind::GreedyMax, DynamicsBackupKind::Expected, {false, true, false}};
    c.update_local = LocalUpdateRule::replace();
    c.reuse_local = true;
    c.label_tol = 1e-6;
    c.default_root_budget = 100000;
    return c;
}

AlgorithmConfig make_labeled_rtdp() {
    auto c = base("labeled_rtdp");
    c.access_required = AccessMode::SettableDescriptive;
    c.solution = {SolutionCoverage::Local, SolutionType::V, {InitScheme::Kind::Heuristic}};
    c.root_kind = RootKind::ForwardSampling;
    c.budget = TrialBudget::exhaustive();
    c.depth = DepthRule::fixed(1);
    c.select.bf = SelectKind::Greedy;
    c.select.af = SelectKind::Ordered;
    c.select.nr = SelectKind::Greedy;
    c.next_state = NextStateKind::Sample;
    c.bootstrap = BootstrapFn::heuristic(nullptr, true);
    c.backup = {PolicyBackupKind::GreedyMax, DynamicsBackupKind::Expected, {false, true, false}};
    c.update_local = LocalUpdateRule::replace();
    c.reuse_local = true;
    c.label_tol = 1e-6;
    c.default_root_budget = 100000;
    return c;
}

AlgorithmConfig make_mc_search() {
    auto c = base("mc_search");
    c.access_required = AccessMode::SettableGenerative;
    c.solution = {SolutionCoverage::Local, SolutionType::Q, {InitScheme::Kind::Uniform, 0.0}};
    c.root_kind = RootKind::ForwardSampling;
    c.budget = TrialBudget::fixed(1000);
    c.depth = DepthRule::fixed(1); // the roll-out supplies the infinite tail
    c.select.bf = SelectKind::Ordered;
    c.select.af = SelectKind::EpsilonGreedy; // uniform roll-out policy
    c.select.nr = SelectKind::Greedy;
    c.select.eps = 1.0;
    c.next_state = NextStateKind::Sample;
    c.bootstrap = BootstrapFn::none();
    c.backup = {PolicyBackupKind::OnPolicySample, DynamicsBackupKind::Sample, {}};
    c.update_local = LocalUpdateRule::average();
    c.recommend = LocalSolution::Recommend::MaxValue;
    c.default_root_budget = 1;
    return c;
}

AlgorithmConfig make_mcts() {
    auto c = base("mcts");
    c.access_required = AccessMode::SettableGenerative;
    c.solution = {SolutionCoverage::Local, SolutionType::Q, {InitScheme::Kind::Optimistic, kAuto}};
    c.root_kind = RootKind::ForwardSampling;
    c.budget = TrialBudget::fixed(1000);
    c.depth = DepthRule::adaptive_frontier();
    c.select.bf = SelectKind::Ucb;
    c.select.af = SelectKind::EpsilonGreedy; // uniform roll-out policy
    c.select.nr = SelectKind::Greedy;
    c.select.eps = 1.0;
    c.next_state = NextStateKind::Sample;
    c.bootstrap = BootstrapFn::none();
    c.backup = {PolicyBackupKind::OnPolicySample, DynamicsBackupKind::Sample,
                {true, false, false}};
    c.update_local = LocalUpdateRule::average();
    c.tree_mode = true;
    c.recommend = LocalSolution::Recommend::MaxCount;
    c.default_root_budget = 1;
    return c;
}

AlgorithmConfig make_q_learning() {
    auto c = base("q_learning");
    c.access_required = AccessMode::ResettableGenerative;
    c.solution = {SolutionCoverage::Global, SolutionType::Q, {InitScheme::Kind::Uniform, 0.0}};
    c.root_kind = RootKind::ForwardSampling;
    c.budget = TrialBudget::fixed(1);
    c.depth = DepthRule::fixed(1);
    c.select.bf = c.select.af = SelectKind::EpsilonGreedy;
    c.select.eps = 0.1;
    c.next_state = NextStateKind::Sample;
    c.bootstrap = BootstrapFn::learned(LearnedTable::Q);
    c.backup = {PolicyBackupKind::GreedyMax, DynamicsBackupKind::Sample, {}};
    c.update_local = LocalUpdateRule::replace();
    c.update_global = GlobalUpdateRule::tabular_step(0.1);
    c.default_root_budget = 50000;
    return c;
}

AlgorithmConfig make_sarsa() {
    auto c = make_q_learning();
    c.name = "sarsa";
    c.backup.policy = PolicyBackupKind::OnPolicySample;
    return c;
}

AlgorithmConfig make_td_lambda() {
    auto c = base("td_lambda");
    c.access_required = AccessMode::ResettableGenerative;
    c.solution = {SolutionCoverage::Global, SolutionType::V, {InitScheme::Kind::Uniform, 0.0}};
    c.root_kind = RootKind::ForwardSampling;
    c.budget = TrialBudget::fixed(1);
    c.depth = DepthRule::fixed(1);
    // Uniform behaviour: the preset evaluates the random policy.
    c.select.bf = c.select.af = SelectKind::EpsilonGreedy;
    c.select.eps = 1.0;
    c.next_state = NextStateKind::Sample;
    c.bootstrap = BootstrapFn::learned(LearnedTable::V);
    c.backup = {PolicyBackupKind::OnPolicySample, DynamicsBackupKind::Sample, {}};
    c.update_local = LocalUpdateRule::eligibility(0.9);
    c.update_global = GlobalUpdateRule::tabular_step(0.1);
    c.default_root_budget = 50000;
    return c;
}

AlgorithmConfig make_reinforce() {
    auto c = base("reinforce");
    c.access_required = AccessMode::ResettableGenerative;
    c.solution = {SolutionCoverage::Global, SolutionType::Policy,
                  {InitScheme::Kind::Uniform, 0.0}};
    c.root_kind = RootKind::ForwardSampling;
    c.budget = TrialBudget::fixed(1);
    c.depth = DepthRule::infinite();
    c.select.bf = c.select.af = SelectKind::StochasticPolicy;
    c.next_state = NextStateKind::Sample;
    c.bootstrap = BootstrapFn::none();
    c.backup = {PolicyBackupKind::OnPolicySample, DynamicsBackupKind::Sample, {}};
    c.update_local = LocalUpdateRule::replace();
    c.update_global = GlobalUpdateRule::policy_gradient(0.1, false);
    c.default_root_budget = 2000;
    return c;
}

AlgorithmConfig make_dyna_q() {
    auto c = base("dyna_q");
    c.access_required = AccessMode::ResettableGenerative;
    c.solution = {SolutionCoverage::Global, SolutionType::Q, {InitScheme::Kind::Uniform, 0.0}};
    c.root_kind = RootKind::VisitedSet; // planning roots
    c.visited_sampling = VisitedSampling::Uniform;
    c.budget = TrialBudget::fixed(1);
    c.depth = DepthRule::fixed(1);
    c.select.bf = c.select.af = SelectKind::EpsilonGreedy;
    c.select.eps = 0.1;
    c.next_state = NextStateKind::Sample;
    c.bootstrap = BootstrapFn::learned(LearnedTable::Q);
    c.backup = {PolicyBackupKind::GreedyMax, DynamicsBackupKind::Sample, {true, false, false}};
    c.update_local = LocalUpdateRule::replace();
    c.update_global = GlobalUpdateRule::tabular_step(0.1);
    c.model_based = true;
    c.planning_steps = 10;
    c.planning_expected = false;
    c.default_root_budget = 20000;
    return c;
}

AlgorithmConfig make_prioritized_sweeping() {
    auto c = base("prioritized_sweeping");
    c.access_required = AccessMode::ResettableGenerative;
    c.solution = {SolutionCoverage::Global, SolutionType::Q, {InitScheme::Kind::Uniform, 0.0}};
    c.root_kind = RootKind::BackwardSampling; // planning roots
    c.ps_threshold = 1e-5;
    c.budget = TrialBudget::fixed(1);
    c.depth = DepthRule::fixed(1);
    c.select.bf = c.select.af = SelectKind::CountNovelty; // state-based (count-novelty) exploration
    c.select.novelty_beta = 2.0; // strong enough to outbid learned values at fresh pairs
    c.next_state = NextStateKind::Sample;
    c.bootstrap = BootstrapFn::learned(LearnedTable::Q);
    c.backup = {PolicyBackupKind::GreedyMax, DynamicsBackupKind::Expected, {true, false, true}};
    c.update_local = LocalUpdateRule::replace();
    c.update_global = GlobalUpdateRule::tabular_step(1.0); // expected model back-ups: replace
    c.model_based = true;
    c.planning_steps = 10;
    c.planning_expected = true;
    c.default_root_budget = 20000;
    return c;
}

} // namespace

AlgorithmConfig preset(const std::string& name) {
    if (name == "value_iteration") return make_value_iteration();
    if (name == "lao_star") return make_lao_star();
    if (name == "labeled_rtdp") return make_labeled_rtdp();
    if (name == "mc_search") return make_mc_search();
    if (name == "mcts") return make_mcts();
    if (name == "q_learning") return make_q_learning();
    if (name == "sarsa") return make_sarsa();
    if (name == "td_lambda") return make_td_lambda();
    if (name == "reinforce") return make_reinforce();
    if (name == "dyna_q") return make_dyna_q();
    if (name == "prioritized_sweeping") return make_prioritized_sweeping();
    throw UnknownPreset("no preset named `" + name + "`");
}

std::vector<std::string> preset_names() {
    return {"value_iteration", "lao_star",  "labeled_rtdp", "mc_search",
            "mcts",            "q_learning", "sarsa",        "td_lambda",
            "reinforce",       "dyna_q",     "prioritized_sweeping"};
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

SelectKind parse_select_kind(const std::string& v) {
    if (v == "ordered") return SelectKind::Ordered;
    if (v == "greedy") return SelectKind::Greedy;
    if (v == "eps_greedy") return SelectKind::EpsilonGreedy;
    if (v == "boltzmann") return SelectKind::Boltzmann;
    if (v == "ucb") return SelectKind::Ucb;
    if (v == "novelty") return SelectKind::CountNovelty;
    if (v == "policy") return SelectKind::StochasticPolicy;
    throw ConfigError("unknown selection rule `" + v + "`");
}

void apply_key(AlgorithmConfig& c, const std::string& key, const std::string& value) {
    auto as_real = [&] { return std::stod(value); };
    auto as_long = [&] { return std::stol(value); };
    auto as_flag = [&] { return value == "1" || value == "true" || value == "yes"; };

    if (key == "preset") return; // handled by the caller
    if (key == "root.kind") {
        if (value == "ordered") c.root_kind = RootKind::Ordered;
        else if (value == "forward") c.root_kind = RootKind::ForwardSampling;
        else if (value == "backward") c.root_kind = RootKind::BackwardSampling;
        else if (value == "visited") c.root_kind = RootKind::VisitedSet;
        else throw ConfigError("unknown root.kind `" + value + "`");
    } else if (key == "root.visited_sampling") {
        if (value == "uniform") c.visited_sampling = VisitedSampling::Uniform;
        else if (value == "recency") c.visited_sampling = VisitedSampling::Recency;
        else throw ConfigError("unknown root.visited_sampling `" + value + "`");
    } else if (key == "budget.kind") {
        if (value == "fixed") c.budget.kind = TrialBudget::Kind::FixedTrials;
        else if (value == "convergence") c.budget.kind = TrialBudget::Kind::UntilConvergence;
        else if (value == "exhaustive") c.budget.kind = TrialBudget::Kind::Exhaustive;
        else throw ConfigError("unknown budget.kind `" + value + "`");
    } else if (key == "budget.trials") {
        c.budget.n = as_long();
        if (c.budget.kind == TrialBudget::Kind::Exhaustive) c.budget.cap = as_long();
    } else if (key == "budget.tol") {
        c.budget.tol = as_real();
    } else if (key == "depth.kind") {
        if (value == "fixed") c.depth.kind = DepthRule::Kind::Fixed;
        else if (value == "infinite") c.depth.kind = DepthRule::Kind::Infinite;
        else if (value == "frontier") c.depth.kind = DepthRule::Kind::AdaptiveFrontier;
        else if (value == "duplicate") c.depth.kind = DepthRule::Kind::AdaptiveDuplicate;
        else throw ConfigError("unknown depth.kind `" + value + "`");
    } else if (key == "depth.n") {
        c.depth.n = static_cast<int>(as_long());
    } else if (key == "depth.cap") {
        c.horizon_cap = static_cast<int>(as_long());
    } else if (key == "ps.threshold") {
        c.ps_threshold = as_real();
    } else if (key == "dyna.planning_steps") {
        c.planning_steps = static_cast<int>(as_long());
    } else if (key == "select.bf") {
        c.select.bf = parse_select_kind(value);
    } else if (key == "select.af") {
        c.select.af = parse_select_kind(value);
    } else if (key == "select.nr") {
        c.select.nr = parse_select_kind(value);
    } else if (key == "select.eps") {
        c.select.eps = as_real();
    } else if (key == "select.eps_final") {
        c.select.eps_final = as_real();
    } else if (key == "select.eps_decay_steps") {
        c.select.eps_decay_steps = as_long();
    } else if (key == "select.temp") {
        c.select.temperature = as_real();
    } else if (key == "select.ucb_c") {
        c.select.ucb_c = as_real();
    } else if (key == "select.novelty_beta") {
        c.select.novelty_beta = as_real();
    } else if (key == "select.next_state") {
        if (value == "sample") c.next_state = NextStateKind::Sample;
        else if (value == "ordered") c.next_state = NextStateKind::Ordered;
        else throw ConfigError("unknown select.next_state `" + value + "`");
    } else if (key == "backup.policy") {
        if (value == "sample") c.backup.policy = PolicyBackupKind::OnPolicySample;
        else if (value == "expected") c.backup.policy = PolicyBackupKind::Expected;
        else if (value == "max") c.backup.policy = PolicyBackupKind::GreedyMax;
        else throw ConfigError("unknown backup.policy `" + value + "`");
    } else if (key == "backup.dynamics") {
        if (value == "sample") c.backup.dynamics = DynamicsBackupKind::Sample;
        else if (value == "expected") c.backup.dynamics = DynamicsBackupKind::Expected;
        else throw ConfigError("unknown backup.dynamics `" + value + "`");
    } else if (key == "backup.extras") {
        c.backup.extras = {};
        std::istringstream parts(value);
        std::string part;
        while (std::getline(parts, part, ',')) {
            part = trim(part);
            if (part == "counts") c.backup.extras.counts = true;
            else if (part == "labels") c.backup.extras.solved_labels = true;
            else if (part == "priorities") c.backup.extras.priorities = true;
            else if (!part.empty() && part != "none")
                throw ConfigError("unknown backup extra `" + part + "`");
        }
    } else if (key == "bootstrap.kind") {
        if (value == "none") c.bootstrap = BootstrapFn::none();
        else if (value == "zero") c.bootstrap = BootstrapFn::zero(c.bootstrap.location);
        else if (value == "heuristic") c.bootstrap = BootstrapFn::heuristic(nullptr, true);
        else if (value == "learned_v") c.bootstrap = BootstrapFn::learned(LearnedTable::V);
        else if (value == "learned_q") c.bootstrap = BootstrapFn::learned(LearnedTable::Q);
        else throw ConfigError("unknown bootstrap.kind `" + value + "`");
    } else if (key == "bootstrap.location") {
        if (value == "state") c.bootstrap.location = BootstrapLocation::State;
        else if (value == "state_action") c.bootstrap.location = BootstrapLocation::StateAction;
        else throw ConfigError("unknown bootstrap.location `" + value + "`");
    } else if (key == "label.tol") {
        c.label_tol = as_real();
    } else if (key == "update.local") {
        if (value == "replace") c.update_local = LocalUpdateRule::replace();
        else if (value == "average") c.update_local = LocalUpdateRule::average();
        else if (value == "step") c.update_local = LocalUpdateRule::step(c.update_local.eta);
        else if (value == "eligibility")
            c.update_local = LocalUpdateRule::eligibility(c.update_local.lambda);
        else throw ConfigError("unknown update.local `" + value + "`");
    } else if (key == "update.global") {
        if (value == "none") c.update_global.reset();
        else if (value == "step")
            c.update_global = GlobalUpdateRule::tabular_step(
                c.update_global ? c.update_global->eta : 0.1);
        else if (value == "policy_gradient")
            c.update_global = GlobalUpdateRule::policy_gradient(
                c.update_global ? c.update_global->eta : 0.1);
        else throw ConfigError("unknown update.global `" + value + "`");
    } else if (key == "update.eta") {
        if (c.update_local.kind == LocalUpdateRule::Kind::Step) c.update_local.eta = as_real();
        if (c.update_global) c.update_global->eta = as_real();
    } else if (key == "update.lambda") {
        c.update_local.lambda = as_real();
    } else if (key == "update.schedule") {
        if (value == "constant") c.schedule = EtaSchedule::Constant;
        else if (value == "harmonic") c.schedule = EtaSchedule::Harmonic;
        else throw ConfigError("unknown update.schedule `" + value + "`");
    } else if (key == "update.schedule_t0") {
        c.schedule_t0 = as_real();
    } else if (key == "update.baseline") {
        if (!c.update_global) throw ConfigError("update.baseline needs a global update rule");
        c.update_global->baseline_v = value == "v_table";
        if (value != "none" && value != "v_table")
            throw ConfigError("unknown update.baseline `" + value + "`");
    } else if (key == "solution.coverage") {
        if (value == "local") c.solution.coverage = SolutionCoverage::Local;
        else if (value == "global") c.solution.coverage = SolutionCoverage::Global;
        else throw ConfigError("unknown solution.coverage `" + value + "`");
    } else if (key == "solution.type") {
        if (value == "v") c.solution.type = SolutionType::V;
        else if (value == "q") c.solution.type = SolutionType::Q;
        else if (value == "policy") c.solution.type = SolutionType::Policy;
        else if (value == "actor_critic") c.solution.type = SolutionType::ActorCritic;
        else throw ConfigError("unknown solution.type `" + value + "`");
    } else if (key == "solution.init") {
        if (value == "uniform") c.solution.init.kind = InitScheme::Kind::Uniform;
        else if (value == "random") c.solution.init.kind = InitScheme::Kind::Random;
        else if (value == "optimistic") {
            c.solution.init.kind = InitScheme::Kind::Optimistic;
            c.solution.init.value = kAuto;
        } else if (value == "heuristic") c.solution.init.kind = InitScheme::Kind::Heuristic;
        else throw ConfigError("unknown solution.init `" + value + "`");
    } else if (key == "solution.init_value") {
        c.solution.init.value = as_real();
    } else if (key == "solution.init_seed") {
        c.solution.init.seed = static_cast<std::uint64_t>(as_long());
    } else if (key == "solution.init_scale") {
        c.solution.init.scale = as_real();
    } else if (key == "access") {
        if (value == "descriptive") c.access_required = AccessMode::SettableDescriptive;
        else if (value == "generative") c.access_required = AccessMode::SettableGenerative;
        else if (value == "resettable") c.access_required = AccessMode::ResettableGenerative;
        else throw ConfigError("unknown access `" + value + "`");
    } else if (key == "reuse_local") {
        c.reuse_local = as_flag();
    } else if (key == "tree_mode") {
        c.tree_mode = as_flag();
    } else if (key == "sync_sweep") {
        c.sync_sweep = as_flag();
    } else if (key == "model_based") {
        c.model_based = as_flag();
    } else if (key == "planning_expected") {
        c.planning_expected = as_flag();
    } else if (key == "recommend") {
        if (value == "max_value") c.recommend = LocalSolution::Recommend::MaxValue;
        else if (value == "max_count") c.recommend = LocalSolution::Recommend::MaxCount;
        else throw ConfigError("unknown recommend `" + value + "`");
    } else if (key == "roots") {
        c.default_root_budget = as_long();
    } else if (key == "outer.tol") {
        c.outer_tol = as_real();
    } else {
        throw ConfigError("unknown config key `" + key + "`");
    }
}

} // namespace

AlgorithmConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string preset_name;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "preset") preset_name = value;
        else pairs.emplace_back(key, value);
    }
    AlgorithmConfig c = preset_name.empty() ? AlgorithmConfig{} : preset(preset_name);
    for (const auto& [key, value] : pairs) apply_key(c, key, value);
    return c;
}

AlgorithmConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

std::string select_kind_name(SelectKind kind) { return to_string(kind); }

} // namespace

std::string config_echo(const AlgorithmConfig& c) {
    std::ostringstream out;
    out << "preset = " << c.name << "\n";
    out << "access = "
        << (c.access_required == AccessMode::SettableDescriptive  ? "descriptive"
            : c.access_required == AccessMode::SettableGenerative ? "generative"
                                                                  : "resettable")
        << "\n";
    out << "solution.coverage = "
        << (c.solution.coverage == SolutionCoverage::Local ? "local" : "global") << "\n";
    out << "solution.type = "
        << (c.solution.type == SolutionType::V        ? "v"
            : c.solution.type == SolutionType::Q      ? "q"
            : c.solution.type == SolutionType::Policy ? "policy"
                                                      : "actor_critic")
        << "\n";
    out << "solution.init = "
        << (c.solution.init.kind == InitScheme::Kind::Uniform      ? "uniform"
            : c.solution.init.kind == InitScheme::Kind::Random     ? "random"
            : c.solution.init.kind == InitScheme::Kind::Optimistic ? "optimistic"
                                                                   : "heuristic")
        << "\n";
    out << "root.kind = "
        << (c.root_kind == RootKind::Ordered            ? "ordered"
            : c.root_kind == RootKind::ForwardSampling  ? "forward"
            : c.root_kind == RootKind::BackwardSampling ? "backward"
                                                        : "visited")
        << "\n";
    out << "budget.kind = "
        << (c.budget.kind == TrialBudget::Kind::FixedTrials        ? "fixed"
            : c.budget.kind == TrialBudget::Kind::UntilConvergence ? "convergence"
                                                                   : "exhaustive")
        << "\n";
    out << "budget.trials = " << c.budget.n << "\n";
    out << "budget.tol = " << c.budget.tol << "\n";
    out << "depth.kind = "
        << (c.depth.kind == DepthRule::Kind::Fixed              ? "fixed"
            : c.depth.kind == DepthRule::Kind::Infinite         ? "infinite"
            : c.depth.kind == DepthRule::Kind::AdaptiveFrontier ? "frontier"
                                                                : "duplicate")
        << "\n";
    out << "depth.n = " << c.depth.n << "\n";
    out << "depth.cap = " << c.horizon_cap << "\n";
    out << "select.bf = " << select_kind_name(c.select.bf) << "\n";
    out << "select.af = " << select_kind_name(c.select.af) << "\n";
    out << "select.nr = " << select_kind_name(c.select.nr.value_or(c.select.bf)) << "\n";
    out << "select.eps = " << c.select.eps << "\n";
    out << "select.temp = " << c.select.temperature << "\n";
    out << "select.ucb_c = " << c.select.ucb_c << "\n";
    out << "select.novelty_beta = " << c.select.novelty_beta << "\n";
    out << "select.next_state = "
        << (c.next_state == NextStateKind::Sample ? "sample" : "ordered") << "\n";
    out << "bootstrap.kind = "
        << (c.bootstrap.kind == BootstrapKind::None        ? "none"
            : c.bootstrap.kind == BootstrapKind::Zero      ? "zero"
            : c.bootstrap.kind == BootstrapKind::Heuristic ? "heuristic"
            : c.bootstrap.table == LearnedTable::V         ? "learned_v"
                                                           : "learned_q")
        << "\n";
    out << "bootstrap.location = "
        << (c.bootstrap.location == BootstrapLocation::State ? "state" : "state_action") << "\n";
    out << "backup.policy = "
        << (c.backup.policy == PolicyBackupKind::OnPolicySample ? "sample"
            : c.backup.policy == PolicyBackupKind::Expected     ? "expected"
                                                                : "max")
        << "\n";
    out << "backup.dynamics = "
        << (c.backup.dynamics == DynamicsBackupKind::Sample ? "sample" : "expected") << "\n";
    {
        std::string extras;
        if (c.backup.extras.counts) extras += "counts";
        if (c.backup.extras.solved_labels) extras += extras.empty() ? "labels" : ",labels";
        if (c.backup.extras.priorities) extras += extras.empty() ? "priorities" : ",priorities";
        out << "backup.extras = " << (extras.empty() ? "none" : extras) << "\n";
    }
    out << "label.tol = " << c.label_tol << "\n";
    out << "update.local = "
        << (c.update_local.kind == LocalUpdateRule::Kind::Replace   ? "replace"
            : c.update_local.kind == LocalUpdateRule::Kind::Average ? "average"
            : c.update_local.kind == LocalUpdateRule::Kind::Step    ? "step"
                                                                    : "eligibility")
        << "\n";
    out << "update.lambda = " << c.update_local.lambda << "\n";
    if (c.update_global) {
        out << "update.global = "
            << (c.update_global->kind == GlobalUpdateRule::Kind::TabularStep ? "step"
                                                                             : "policy_gradient")
            << "\n";
        out << "update.eta = " << c.update_global->eta << "\n";
        out << "update.baseline = " << (c.update_global->baseline_v ? "v_table" : "none") << "\n";
    } else {
        out << "update.global = none\n";
    }
    out << "update.schedule = "
        << (c.schedule == EtaSchedule::Constant ? "constant" : "harmonic") << "\n";
    out << "reuse_local = " << (c.reuse_local ? 1 : 0) << "\n";
    out << "tree_mode = " << (c.tree_mode ? 1 : 0) << "\n";
    out << "sync_sweep = " << (c.sync_sweep ? 1 : 0) << "\n";
    out << "model_based = " << (c.model_based ? 1 : 0) << "\n";
    out << "planning_expected = " << (c.planning_expected ? 1 : 0) << "\n";
    out << "dyna.planning_steps = " << c.planning_steps << "\n";
    out << "ps.threshold = " << c.ps_threshold << "\n";
    out << "recommend = "
        << (c.recommend == LocalSolution::Recommend::MaxValue ? "max_value" : "max_count")
        << "\n";
    out << "roots = " << c.default_root_budget << "\n";
    out << "outer.tol = " << c.outer_tol << "\n";
    return out.str();
}

} // namespace frap

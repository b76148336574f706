#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "frap/backup.hpp"
#include "frap/control.hpp"
#include "frap/mdp.hpp"
#include "frap/model.hpp"
#include "frap/select.hpp"
#include "frap/solution.hpp"
#include "frap/update.hpp"

namespace frap {

struct GlobalUpdateRule {
    enum class Kind { TabularStep, PolicyGradientSoftmax };
    Kind kind = Kind::TabularStep;
    double eta = 0.1;
    bool baseline_v = false; // PolicyGradientSoftmax: subtract V^g(s)

    static GlobalUpdateRule tabular_step(double eta) { return {Kind::TabularStep, eta, false}; }
    static GlobalUpdateRule policy_gradient(double eta, bool baseline_v = false) {
        return {Kind::PolicyGradientSoftmax, eta, baseline_v};
    }
};

/// Move one global table entry eta toward target.
void global_tabular_update(const GlobalUpdateRule& rule, GlobalSolution& global, StateId s,
                           std::optional<ActionId> a, double target, double eta_now);

/// Tabular-softmax policy gradient over a completed trace: for each step t,
/// logits(s_t, .) += eta * (G_t - b(s_t)) * (onehot(a_t) - pi(.|s_t)), with
/// all probabilities taken at the pre-update parameters (batch gradient).
/// Requires trace.return_estimates. Throws MissingReturns.
void policy_gradient_update(const GlobalUpdateRule& rule, GlobalSolution& global,
                            const TraceRecord& trace, double eta_now);

/// The full dimension vector: one field per framework decision. A preset is a
/// named constant of this type.
struct AlgorithmConfig {
    std::string name = "custom";

    SolutionSpec solution;
    RootKind root_kind = RootKind::Ordered;
    VisitedSampling visited_sampling = VisitedSampling::Uniform;
    double ps_threshold = 1e-5;

    TrialBudget budget;
    DepthRule depth;
    SelectionRule select;
    NextStateKind next_state = NextStateKind::Sample;
    BootstrapFn bootstrap;
    BackupOp backup;
    LocalUpdateRule update_local;
    std::optional<GlobalUpdateRule> update_global;
    EtaSchedule schedule = EtaSchedule::Constant;
    double schedule_t0 = 100.0;

    AccessMode access_required = AccessMode::SettableDescriptive;
    long default_root_budget = 1000;
    bool reuse_local = false;
    bool tree_mode = false;
    /// Ordered-root runs only: bootstrap from a per-sweep frozen copy of the
    /// global table (synchronous Jacobi sweeps).
    bool sync_sweep = false;
    /// Learn a tabular model from real steps and add a planning phase per
    /// real root (Dyna / prioritized sweeping).
    bool model_based = false;
    int planning_steps = 10;
    /// Planning back-ups use the expected (full-distribution) form over the
    /// learned model instead of sampling from it.
    bool planning_expected = false;

    LocalSolution::Recommend recommend = LocalSolution::Recommend::MaxValue;
    double label_tol = 1e-6;
    double outer_tol = 1e-6; // ordered-root sweep convergence
    int horizon_cap = 0;     // 0: 10 * n_states
};

/// Check every dimension/access invariant against the handle's actual mode.
/// Throws ConfigError naming the incompatible dimensions.
void validate_config(const AlgorithmConfig& config, AccessMode actual_mode);

struct RootRecord {
    long iter = 0;
    StateId root = 0;
    long trials = 0;
    double residual = 0.0;
    double v_root = 0.0;
    double episode_return = std::numeric_limits<double>::quiet_NaN();
    long query_count = 0;
    double wall_ms = 0.0;
};

struct RunResult {
    std::vector<RootRecord> roots;
    GlobalSolution global; // final snapshot (synthesized by state for local coverage)
    LocalSolution final_local;
    /// Synchronous-sweep runs: V table after each completed sweep.
    std::vector<std::vector<double>> sweep_tables;
    long query_count = 0;       // real-environment queries
    long model_query_count = 0; // planning queries against the learned model
    double wall_ms = 0.0;
    std::uint64_t seed = 0;
    std::string config_echo;
    bool converged = false;
    bool solved_root = false; // labeled runs: initial state solved
    long outer_iterations = 0;

    /// Greedy state values out of whatever tables the run kept.
    std::vector<double> value_table() const;
};

/// Execute the outer loop: init global, first root, then per root
/// {trials, global update, next root, local carryover} until the root budget,
/// ordered-sweep convergence, or solved-label termination.
/// `root_budget` <= 0 uses the config default. `record_timings` fills per-row
/// wall_ms (off by default so emitted metrics stay reproducible).
RunResult run(const AlgorithmConfig& config, AccessHandle& handle, long root_budget,
              std::uint64_t seed, bool record_timings = false);

/// Named algorithm presets. Throws UnknownPreset.
AlgorithmConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Flat `key = value` config text: a preset plus overrides.
AlgorithmConfig parse_config(const std::string& text);
AlgorithmConfig parse_config_file(const std::string& path);
std::string config_echo(const AlgorithmConfig& config);

} // namespace frap

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "frap/mdp.hpp"
#include "frap/solution.hpp"

namespace frap {

enum class BootstrapKind { None, Zero, Heuristic, LearnedGlobal };
enum class BootstrapLocation { State, StateAction };
enum class LearnedTable { V, Q };

/// Leaf evaluation when a trial is cut short. Kind None means the engine
/// rolls the trial out instead of bootstrapping (Monte Carlo evaluation).
struct BootstrapFn {
    BootstrapKind kind = BootstrapKind::Zero;
    BootstrapLocation location = BootstrapLocation::State;
    LearnedTable table = LearnedTable::V;
    std::function<double(StateId)> h_state;
    std::function<double(StateId, ActionId)> h_state_action;
    bool admissible = false;

    static BootstrapFn none() {
        BootstrapFn f;
        f.kind = BootstrapKind::None;
        return f;
    }
    static BootstrapFn zero(BootstrapLocation loc = BootstrapLocation::State) {
        BootstrapFn f;
        f.kind = BootstrapKind::Zero;
        f.location = loc;
        return f;
    }
    static BootstrapFn learned(LearnedTable table) {
        BootstrapFn f;
        f.kind = BootstrapKind::LearnedGlobal;
        f.table = table;
        f.location = table == LearnedTable::V ? BootstrapLocation::State
                                              : BootstrapLocation::StateAction;
        return f;
    }
    static BootstrapFn heuristic(std::function<double(StateId)> h, bool admissible) {
        BootstrapFn f;
        f.kind = BootstrapKind::Heuristic;
        f.h_state = std::move(h);
        f.admissible = admissible;
        return f;
    }
};

/// Terminal states evaluate to exactly 0 under every kind.
double bootstrap_state(const BootstrapFn& fn, StateId s, bool terminal, const GlobalSolution* g);
double bootstrap_state_action(const BootstrapFn& fn, StateId s, ActionId a, bool terminal,
                              const GlobalSolution* g);

enum class PolicyBackupKind { OnPolicySample, Expected, GreedyMax };
enum class DynamicsBackupKind { Sample, Expected };

struct BackupExtras {
    bool counts = false;
    bool solved_labels = false;
    bool priorities = false;
};

struct BackupOp {
    PolicyBackupKind policy = PolicyBackupKind::GreedyMax;
    DynamicsBackupKind dynamics = DynamicsBackupKind::Sample;
    BackupExtras extras;
};

/// Aggregate child action values into a state value.
///   OnPolicySample: q_children[chosen]
///   Expected:       sum over policy_probs (must sum to 1 within 1e-9)
///   GreedyMax:      max value, ties to the lowest action index
double policy_backup(PolicyBackupKind kind, const std::map<ActionId, double>& q_children,
                     std::optional<ActionId> chosen = std::nullopt,
                     const std::map<ActionId, double>* policy_probs = nullptr);

struct WeightedSuccessor {
    double prob;
    double reward;
    double value; // V-hat at the successor
};

/// Sample dynamics back-up: r + gamma * v_next.
double dynamics_backup_sample(double reward, double gamma, double next_value);
/// Expected dynamics back-up over the full successor distribution, summed in
/// stored order: sum p * (r + gamma * v).
double dynamics_backup_expected(const std::vector<WeightedSuccessor>& successors, double gamma);

/// State-value view used by the solved-label sweep; binds whatever store the
/// run keeps its values in.
struct ValueView {
    std::function<double(StateId)> get;
    std::function<void(StateId, double)> set;
    std::function<bool(StateId)> is_solved;
    std::function<void(StateId)> mark_solved;
};

/// Depth-first residual sweep over the greedy envelope of `s` (the
/// labeled-RTDP check): `s` and every state reached through greedy actions is
/// labeled solved iff all their Bellman residuals are <= tol. On failure the
/// visited states get one Bellman update each (in reverse visit order) so the
/// envelope keeps improving. Requires descriptive access.
bool check_solved(StateId s, AccessHandle& handle, double gamma, double tol, ValueView view);

/// Process a completed linear trace deepest-first: the leaf evaluates to
/// `leaf_value` (0 at terminals), then one dynamics and one policy back-up
/// per step up to the root. Fills trace.return_estimates with the discounted
/// suffix returns and returns the 2*depth estimates, deepest first.
/// `q_source`, when given, supplies values for the `n_actions` actions the
/// trace did not take (GreedyMax / Expected policy back-ups at trace states);
/// NaN entries are treated as unavailable.
std::vector<BackupEstimate> walk_back(
    TraceRecord& trace, const BackupOp& op, double gamma, double leaf_value, int n_actions = 0,
    const std::function<double(StateId, ActionId)>* q_source = nullptr,
    const std::function<std::vector<double>(StateId)>* policy = nullptr);

} // namespace frap

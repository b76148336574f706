#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "frap/errors.hpp"
#include "frap/mdp.hpp"
#include "frap/update.hpp"

namespace frap {

enum class SolutionCoverage { Local, Global };
enum class SolutionType { V, Q, Policy, ActorCritic };

struct InitScheme {
    enum class Kind { Uniform, Random, Optimistic, Heuristic };
    Kind kind = Kind::Uniform;
    double value = 0.0;         // Uniform constant / Optimistic bound
    std::uint64_t seed = 0;     // Random
    double scale = 0.01;        // Random
};

struct SolutionSpec {
    SolutionCoverage coverage = SolutionCoverage::Global;
    SolutionType type = SolutionType::V;
    InitScheme init;
};

/// Persistent tables covering every state. Which tables exist is fixed at
/// init; reading a disabled table is a programming error (asserted).
class GlobalSolution {
public:
    GlobalSolution() = default;

    bool has_v = false;
    bool has_q = false;
    bool has_policy = false;
    bool has_counts = false;
    bool has_solved = false;

    int n_states = 0;
    int n_actions = 0;

    std::vector<double> v;
    std::vector<double> q;              // row-major [s][a]
    std::vector<double> policy_logits;  // row-major [s][a]
    std::vector<long> counts_s;
    std::vector<long> counts_sa;
    std::set<StateId> solved;

    double& q_at(StateId s, ActionId a) { return q[static_cast<std::size_t>(s) * n_actions + a]; }
    double q_at(StateId s, ActionId a) const {
        return q[static_cast<std::size_t>(s) * n_actions + a];
    }
    double& logit_at(StateId s, ActionId a) {
        return policy_logits[static_cast<std::size_t>(s) * n_actions + a];
    }
    long& count_sa_at(StateId s, ActionId a) {
        return counts_sa[static_cast<std::size_t>(s) * n_actions + a];
    }
    long count_sa_at(StateId s, ActionId a) const {
        return counts_sa[static_cast<std::size_t>(s) * n_actions + a];
    }

    /// Softmax over the state's logits (numerically stabilized).
    std::vector<double> policy_probs(StateId s) const;

    std::string snapshot_json() const;
};

/// Build the tables named by `spec`. Heuristic init requires `heuristic`;
/// otherwise UnsupportedInit.
GlobalSolution init_global(const SolutionSpec& spec, int n_states, int n_actions,
                           const std::function<double(StateId)>* heuristic = nullptr);

struct TraceStep {
    StateId state;
    ActionId action;
    double reward;
    StateId next_state;
};

/// One forward trace plus the per-offset cumulative returns filled in during
/// the back-up phase.
struct TraceRecord {
    std::vector<TraceStep> steps;
    int depth = 0;
    bool ended_terminal = false;
    double bootstrap_value = 0.0;
    std::vector<double> return_estimates; // offsets 0..depth

    StateId state_at(int offset) const {
        return offset < depth ? steps[offset].state : steps.back().next_state;
    }
};

struct BackupEstimate {
    enum class Kind { State, StateAction };
    Kind kind = Kind::State;
    StateId s = 0;
    std::optional<ActionId> a;
    double value = 0.0;
    int source_depth = 1;
};

/// Node identifier within a local solution: the state itself in graph mode, a
/// path hash in tree mode (so duplicate states stay distinct nodes).
using NodeId = std::uint64_t;

/// Per-root aggregation store: node table, frontier/explored sets and the
/// trace buffer used by episodic presets.
class LocalSolution {
public:
    struct Node {
        StateId state = 0;
        double v_agg = 0.0;
        std::vector<double> q_agg;
        long n_s = 0;
        std::vector<long> n_sa;
        bool solved = false;
    };

    struct Options {
        bool tree_mode = false;
        int n_actions = 0;
        std::function<double(StateId)> v_init;                // default 0
        std::function<double(StateId, ActionId)> q_init;      // default 0
    };

    LocalSolution() = default;
    LocalSolution(StateId root, Options options);

    StateId root() const { return root_; }
    NodeId root_key() const { return root_key_; }
    bool tree_mode() const { return options_.tree_mode; }

    NodeId state_key(StateId s) const { return static_cast<NodeId>(s); }
    /// Child key along a trial path (tree mode mixes the parent key; graph
    /// mode collapses to the state).
    NodeId child_key(NodeId parent, ActionId a, StateId next) const;

    bool contains(NodeId key) const { return nodes_.count(key) > 0; }
    bool on_frontier(NodeId key) const { return frontier_.count(key) > 0; }
    bool is_explored(NodeId key) const { return explored_.count(key) > 0; }

    Node& node(NodeId key);
    const Node& node(NodeId key) const;
    Node* find(NodeId key);
    const Node* find(NodeId key) const;

    /// Create a node record for `key` (state `s`) and place it on the
    /// frontier. No-op if the record exists.
    Node& touch(NodeId key, StateId s);

    /// Move a frontier node to the explored set. Throws NotOnFrontier.
    void expand_node(NodeId key);

    /// Fold a back-up estimate into the node's aggregate and bump counts.
    void record_estimate(NodeId key, const BackupEstimate& est, const LocalUpdateRule& rule);

    /// Argmax over local child values (MaxValue) or visit counts (MaxCount);
    /// ties break to the lowest action index. Throws NoVisitedChildren.
    enum class Recommend { MaxValue, MaxCount };
    ActionId recommend_action(NodeId key, Recommend mode) const;

    std::size_t n_nodes() const { return nodes_.size(); }
    const std::unordered_map<NodeId, Node>& nodes() const { return nodes_; }
    const std::unordered_set<NodeId>& frontier() const { return frontier_; }
    const std::unordered_set<NodeId>& explored() const { return explored_; }

    std::vector<TraceRecord> trace_buffer;

    std::string snapshot_json() const;

    /// Re-root a carried-over store (graph mode); the root record is created
    /// on the frontier unless it already exists.
    void rebase(StateId new_root);

private:
    StateId root_ = 0;
    NodeId root_key_ = 0;
    Options options_;
    std::unordered_map<NodeId, Node> nodes_;
    std::unordered_set<NodeId> frontier_;
    std::unordered_set<NodeId> explored_;
};

/// Fresh store rooted at `root`. With `carryover` given and reuse enabled,
/// node records, sets and the trace buffer are retained.
LocalSolution init_local(StateId root, const LocalSolution* carryover, bool reuse,
                         LocalSolution::Options options);

} // namespace frap

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "frap/errors.hpp"
#include "frap/rng.hpp"

namespace frap {

using StateId = int;
using ActionId = int;

struct Transition {
    StateId next;
    double prob;
    double reward;
};

/// Ground-truth tabular MDP. Immutable after validate(); shareable across
/// threads. Transition lists keep file/constructor order, which ordered
/// next-state selection and the emitter rely on.
class TabularMdp {
public:
    TabularMdp(int n_states, int n_actions, double gamma)
        : n_states_(n_states), n_actions_(n_actions), gamma_(gamma),
          transitions_(static_cast<std::size_t>(n_states) * n_actions) {}

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }
    double gamma() const { return gamma_; }

    void add_transition(StateId s, ActionId a, StateId next, double prob, double reward);
    void set_terminal(StateId s) { terminals_.insert(s); }
    void add_initial(StateId s, double prob) { initial_dist_.emplace_back(s, prob); }

    bool is_terminal(StateId s) const { return terminals_.count(s) > 0; }
    const std::set<StateId>& terminals() const { return terminals_; }
    const std::vector<std::pair<StateId, double>>& initial_dist() const { return initial_dist_; }

    const std::vector<Transition>& transitions(StateId s, ActionId a) const {
        return transitions_[index(s, a)];
    }

    /// Highest absolute reward over all transitions; used for optimistic bounds.
    double max_reward() const;
    /// True when every transition reward is strictly negative (SSP shape).
    bool all_rewards_negative() const;

    /// Merges duplicate (s,a,s') edges (probabilities summed, rewards
    /// probability-weighted), then checks every invariant. Throws
    /// ValidationError naming the violated invariant. `warnings`, when given,
    /// collects one line per merged edge.
    void validate(std::vector<std::string>* warnings = nullptr);

    /// Predecessor map over the true dynamics: for s', all (s,a) with
    /// positive probability of reaching it.
    std::vector<std::vector<std::pair<StateId, ActionId>>> reverse_map() const;

private:
    std::size_t index(StateId s, ActionId a) const {
        return static_cast<std::size_t>(s) * n_actions_ + a;
    }

    int n_states_;
    int n_actions_;
    double gamma_;
    std::vector<std::vector<Transition>> transitions_;
    std::set<StateId> terminals_;
    std::vector<std::pair<StateId, double>> initial_dist_;
};

enum class AccessMode {
    SettableDescriptive,
    SettableGenerative,
    ResettableGenerative,
};

std::string to_string(AccessMode mode);

/// Either the full next-state distribution (descriptive access) or a single
/// draw from it (generative access).
struct QueryResult {
    std::optional<std::vector<Transition>> distribution;
    std::optional<std::pair<StateId, double>> sample;
};

/// Capability-restricted view of an MDP. Single-owner; independent handles
/// over the same TabularMdp may run in parallel.
class AccessHandle {
public:
    AccessHandle(const TabularMdp& mdp, AccessMode mode, std::uint64_t seed);

    AccessMode mode() const { return mode_; }
    const TabularMdp& mdp() const { return *mdp_; }
    std::uint64_t seed() const { return seed_; }
    long query_count() const { return query_count_; }
    StateId current_state() const { return current_state_; }

    QueryResult query_descriptive(StateId s, ActionId a);
    QueryResult query_generative(StateId s, ActionId a);

    /// ResettableGenerative only: advance the environment.
    std::tuple<StateId, double, bool> step(ActionId a);
    /// ResettableGenerative only: draw a fresh state from p0.
    StateId reset();

private:
    std::pair<StateId, double> sample_transition(StateId s, ActionId a);

    const TabularMdp* mdp_;
    AccessMode mode_;
    std::uint64_t seed_;
    Rng rng_;
    StateId current_state_ = -1;
    long query_count_ = 0;
};

/// Parse the line-based MDP text format. Throws ParseError (with line number)
/// or ValidationError.
TabularMdp load_mdp(std::istream& in, std::vector<std::string>* warnings = nullptr);
TabularMdp load_mdp_string(const std::string& text, std::vector<std::string>* warnings = nullptr);
TabularMdp load_mdp_file(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// Canonical emit: probabilities/rewards printed with 17 significant digits
/// so emit/load round-trips are lossless.
std::string emit_mdp(const TabularMdp& mdp, const std::string& header_comment = "");

struct Cell {
    int x;
    int y;
    auto operator<=>(const Cell&) const = default;
};

TabularMdp make_chain(int n, double gamma);
TabularMdp make_gridworld(int width, int height, const std::set<Cell>& walls, Cell goal,
                          double slip, double step_reward, double goal_reward, double gamma);
TabularMdp make_ssp_racetrack_small();

/// Built-in benchmark registry ("chain3", "chain10", "gridworld5",
/// "ssp_racetrack", "split"). Throws InvalidLayout for unknown names.
TabularMdp make_builtin(const std::string& name);
std::vector<std::string> builtin_names();

} // namespace frap

#include "frap/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace frap {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

void global_tabular_update(const GlobalUpdateRule&, GlobalSolution& global, StateId s,
                           std::optional<ActionId> a, double target, double eta_now) {
    double& entry = a ? global.q_at(s, *a) : global.v[s];
    if (eta_now == 1.0) {
        entry = target;
        return;
    }
    entry = entry + eta_now * (target - entry);
}

void policy_gradient_update(const GlobalUpdateRule& rule, GlobalSolution& global,
                            const TraceRecord& trace, double eta_now) {
    if (trace.return_estimates.size() != static_cast<std::size_t>(trace.depth) + 1)
        throw MissingReturns("trace has no return estimates");
    // Batch gradient: probabilities taken at the pre-update parameters.
    std::vector<std::vector<double>> probs(static_cast<std::size_t>(trace.depth));
    for (int t = 0; t < trace.depth; ++t) probs[t] = global.policy_probs(trace.steps[t].state);

    for (int t = 0; t < trace.depth; ++t) {
        const TraceStep& step = trace.steps[t];
        double advantage = trace.return_estimates[t];
        if (rule.baseline_v && global.has_v) advantage -= global.v[step.state];
        const double scale = eta_now * advantage;
        for (ActionId a = 0; a < global.n_actions; ++a) {
            const double indicator = a == step.action ? 1.0 : 0.0;
            global.logit_at(step.state, a) += scale * (indicator - probs[t][a]);
        }
    }
}

void validate_config(const AlgorithmConfig& config, AccessMode actual_mode) {
    const bool descriptive = actual_mode == AccessMode::SettableDescriptive;
    const bool resettable = actual_mode == AccessMode::ResettableGenerative;

    if (config.backup.dynamics == DynamicsBackupKind::Expected && !descriptive &&
        !config.model_based)
        throw ConfigError(
            "dynamics-expectation requires descriptive access (backup.dynamics = expected vs "
            "access = " +
            to_string(actual_mode) + ")");
    if (config.next_state == NextStateKind::Ordered && !descriptive)
        throw ConfigError("ordered next-state selection requires descriptive access (vs " +
                          to_string(actual_mode) + ")");
    if (resettable) {
        const bool single_trial =
            config.budget.kind == TrialBudget::Kind::FixedTrials && config.budget.n <= 1;
        if (!single_trial)
            throw ConfigError("trial budget above one trial per root requires settable access "
                              "(budget vs access = resettable_generative)");
        if (config.root_kind != RootKind::ForwardSampling && !config.model_based)
            throw ConfigError(
                "root selection beyond forward sampling requires settable access or a "
                "learned model (root.kind vs access = resettable_generative)");
    }
    if (config.model_based && !resettable)
        throw ConfigError(
            "model learning expects irreversible access (model vs access = " +
            to_string(actual_mode) + ")");
    if (config.solution.coverage == SolutionCoverage::Local && config.update_global)
        throw ConfigError("local solution coverage excludes a global update rule");
    if (config.solution.coverage == SolutionCoverage::Global && !config.update_global)
        throw ConfigError("global solution coverage requires a global update rule");
    if (config.sync_sweep && config.root_kind != RootKind::Ordered)
        throw ConfigError("synchronous sweeps require ordered root selection");
    if (config.tree_mode && config.reuse_local)
        throw ConfigError("path-keyed (tree) local stores cannot be re-rooted "
                          "(tree_mode vs reuse_local)");
    if (config.update_global &&
        config.update_global->kind == GlobalUpdateRule::Kind::PolicyGradientSoftmax &&
        config.solution.type != SolutionType::Policy &&
        config.solution.type != SolutionType::ActorCritic)
        throw ConfigError("policy-gradient update requires a policy solution type");
}

std::vector<double> RunResult::value_table() const {
    if (global.has_v) return global.v;
    std::vector<double> v(static_cast<std::size_t>(global.n_states), 0.0);
    if (global.has_q) {
        for (StateId s = 0; s < global.n_states; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (ActionId a = 0; a < global.n_actions; ++a)
                best = std::max(best, global.q_at(s, a));
            v[s] = best;
        }
    }
    return v;
}

namespace {

/// One run of the outer loop; owns every mutable store.
class EngineRun {
public:
    EngineRun(const AlgorithmConfig& config, AccessHandle& handle, std::uint64_t seed,
              bool record_timings)
        : cfg_(config), handle_(handle), mdp_(handle.mdp()), rng_(seed), seed_(seed),
          record_timings_(record_timings) {
        resolve_defaults();

        if (cfg_.solution.coverage == SolutionCoverage::Global) {
            has_global_ = true;
            const std::function<double(StateId)>* h =
                cfg_.bootstrap.h_state ? &cfg_.bootstrap.h_state : nullptr;
            global_ = init_global(cfg_.solution, mdp_.n_states(), mdp_.n_actions(), h);
        }
        if (cfg_.model_based) model_.emplace(mdp_.n_states(), mdp_.n_actions());

        switch (cfg_.root_kind) {
            case RootKind::Ordered: strategy_ = RootStrategy::ordered(); break;
            case RootKind::ForwardSampling: strategy_ = RootStrategy::forward(); break;
            case RootKind::BackwardSampling:
                strategy_ = RootStrategy::backward(cfg_.ps_threshold);
                break;
            case RootKind::VisitedSet:
                strategy_ = RootStrategy::visited(cfg_.visited_sampling);
                break;
        }
    }

    RunResult execute(long root_budget);

private:
    struct TrialCtx {
        int expansion_depth = -1; // depth of the node expanded this trial
        bool expanded = false;
        int leaf_depth = 0;
        bool linear = true;
        TraceRecord trace;
        std::set<NodeId> visited;
        std::vector<ActionId>* root_actions = nullptr;
    };

    // --- configuration resolution -----------------------------------------

    void resolve_defaults() {
        if (cfg_.horizon_cap <= 0) cfg_.horizon_cap = 10 * mdp_.n_states();
        if (cfg_.budget.kind == TrialBudget::Kind::Exhaustive && cfg_.budget.cap <= 0)
            cfg_.budget.cap = mdp_.n_actions();
        if (cfg_.solution.init.kind == InitScheme::Kind::Optimistic &&
            std::isnan(cfg_.solution.init.value))
            cfg_.solution.init.value = optimistic_bound();
        if (cfg_.bootstrap.kind == BootstrapKind::Heuristic && !cfg_.bootstrap.h_state) {
            // Default admissible heuristic: 0 for all-negative-reward (SSP)
            // problems, the optimistic discounted bound otherwise.
            const double c = mdp_.all_rewards_negative() ? 0.0 : optimistic_bound();
            cfg_.bootstrap.h_state = [c](StateId) { return c; };
            cfg_.bootstrap.admissible = true;
        }
    }

    double optimistic_bound() const {
        if (mdp_.all_rewards_negative()) return 0.0;
        const double r_max = mdp_.max_reward();
        if (mdp_.gamma() < 1.0) return r_max / (1.0 - mdp_.gamma());
        return r_max * cfg_.horizon_cap;
    }

    LocalSolution::Options local_options() const {
        LocalSolution::Options opt;
        opt.tree_mode = cfg_.tree_mode;
        opt.n_actions = mdp_.n_actions();
        const InitScheme& init = cfg_.solution.init;
        if (init.kind == InitScheme::Kind::Heuristic && cfg_.bootstrap.h_state) {
            auto h = cfg_.bootstrap.h_state;
            opt.v_init = h;
            opt.q_init = [h](StateId s, ActionId) { return h(s); };
        } else if (init.kind == InitScheme::Kind::Optimistic) {
            const double c = init.value;
            opt.v_init = [c](StateId) { return c; };
            opt.q_init = [c](StateId, ActionId) { return c; };
        }
        return opt;
    }

    /// Real roots follow the environment for irreversible access and for all
    /// model-based configurations (the root strategy then drives planning).
    bool forward_real_roots() const {
        return cfg_.model_based || (cfg_.root_kind == RootKind::ForwardSampling &&
                                    handle_.mode() == AccessMode::ResettableGenerative);
    }

    // --- value sources -----------------------------------------------------

    const GlobalSolution* bootstrap_source() const {
        if (!has_global_) return nullptr;
        return cfg_.sync_sweep ? &frozen_ : &global_;
    }

    bool q_bootstrap_available() const {
        if (cfg_.bootstrap.kind == BootstrapKind::LearnedGlobal)
            return cfg_.bootstrap.table == LearnedTable::Q && has_global_ && global_.has_q;
        if (cfg_.bootstrap.kind == BootstrapKind::Heuristic)
            return static_cast<bool>(cfg_.bootstrap.h_state_action);
        return false;
    }

    double q_bootstrap(StateId s, ActionId a) const {
        return bootstrap_state_action(cfg_.bootstrap, s, a, mdp_.is_terminal(s),
                                      bootstrap_source());
    }

    /// Leaf evaluation of a state: the stored local estimate when one exists
    /// (heuristic-search reuse), otherwise the configured bootstrap.
    double leaf_state_value(StateId s, NodeId key) {
        if (cfg_.bootstrap.kind != BootstrapKind::LearnedGlobal) {
            if (const auto* node = local_.find(key); node && node->n_s > 0) return node->v_agg;
        }
        return bootstrap_state(cfg_.bootstrap, s, mdp_.is_terminal(s), bootstrap_source());
    }

    double action_value(const LocalSolution::Node* node, StateId s, ActionId a) const {
        if (node && node->n_sa[a] > 0) return node->q_agg[a];
        if (q_bootstrap_available()) return q_bootstrap(s, a);
        if (node) return node->q_agg[a]; // init value (optimistic / heuristic)
        return 0.0;
    }

    ActionContext action_context(StateId s, NodeId key, std::vector<double>* policy_storage) {
        const auto* node = local_.find(key);
        ActionContext ctx;
        ctx.n_actions = mdp_.n_actions();
        ctx.q_value = [this, node, s](ActionId a) { return action_value(node, s, a); };
        ctx.visited = [node](ActionId a) { return node && node->n_sa[a] > 0; };
        const bool use_global_counts = has_global_ && global_.has_counts && !cfg_.tree_mode;
        ctx.count_sa = [this, node, s, use_global_counts](ActionId a) {
            if (use_global_counts) return global_.count_sa_at(s, a);
            return node ? node->n_sa[a] : 0L;
        };
        ctx.count_s = node ? node->n_s : 0;
        ctx.has_q_source =
            q_bootstrap_available() || cfg_.solution.init.kind == InitScheme::Kind::Optimistic;
        if (has_global_ && global_.has_policy && policy_storage) {
            *policy_storage = global_.policy_probs(s);
            ctx.policy_probs = policy_storage;
        }
        ctx.decay_step = outer_iter_;
        return ctx;
    }

    ActionId choose_action(StateId s, NodeId key, Phase phase) {
        std::vector<double> policy_storage;
        const auto ctx = action_context(s, key, &policy_storage);
        return select_action(cfg_.select, phase, ctx, rng_);
    }

    /// Behavioural action probabilities at a state, for expected policy
    /// back-ups.
    std::vector<double> behavior_probs(StateId s, NodeId key, Phase phase) {
        std::vector<double> policy_storage;
        const auto ctx = action_context(s, key, &policy_storage);
        const int n = ctx.n_actions;
        std::vector<double> probs(static_cast<std::size_t>(n), 0.0);
        switch (cfg_.select.for_phase(phase)) {
            case SelectKind::EpsilonGreedy: {
                const double eps = cfg_.select.epsilon_at(ctx.decay_step);
                ActionId best = 0;
                double best_q = -std::numeric_limits<double>::infinity();
                for (ActionId a = 0; a < n; ++a) {
                    const double q = ctx.q_value(a);
                    if (q > best_q) {
                        best_q = q;
                        best = a;
                    }
                }
                for (ActionId a = 0; a < n; ++a) probs[a] = eps / n;
                probs[best] += 1.0 - eps;
                break;
            }
            case SelectKind::Boltzmann: {
                std::vector<double> q(static_cast<std::size_t>(n));
                for (ActionId a = 0; a < n; ++a) q[a] = ctx.q_value(a);
                probs = boltzmann_probs(q, cfg_.select.temperature);
                break;
            }
            case SelectKind::StochasticPolicy: probs = global_.policy_probs(s); break;
            default: {
                // Deterministic rules: point mass on the would-be choice.
                Rng probe(0);
                probs[select_action(cfg_.select, phase, ctx, probe)] = 1.0;
                break;
            }
        }
        return probs;
    }

    // --- environment access -------------------------------------------------

    StateId sample_p0() {
        const auto& p0 = mdp_.initial_dist();
        double u = rng_.uniform();
        for (const auto& [s, p] : p0) {
            u -= p;
            if (u < 0.0) return s;
        }
        return p0.back().first;
    }

    /// One forward query within a trial. Irreversible access advances the
    /// real environment, so the trial and the environment share one path.
    QueryResult trial_query(StateId s, ActionId a) {
        switch (handle_.mode()) {
            case AccessMode::SettableDescriptive: return handle_.query_descriptive(s, a);
            case AccessMode::SettableGenerative: return handle_.query_generative(s, a);
            case AccessMode::ResettableGenerative: {
                if (s != handle_.current_state())
                    throw WrongAccessMode("trial tried to query state " + std::to_string(s) +
                                          " away from the environment state " +
                                          std::to_string(handle_.current_state()));
                auto [next, reward, terminal] = handle_.step(a);
                note_real_reward(reward, terminal);
                QueryResult out;
                out.sample = {next, reward};
                return out;
            }
        }
        return {};
    }

    void note_real_reward(double reward, bool terminal) {
        episode_acc_ += episode_disc_ * reward;
        episode_disc_ *= mdp_.gamma();
        if (terminal) {
            completed_return_ = episode_acc_;
            episode_done_ = true;
        }
    }

    void reset_episode() {
        episode_acc_ = 0.0;
        episode_disc_ = 1.0;
        pending_action_.reset();
    }

    // --- the trial recursion -------------------------------------------------

    bool storing_at(int depth, const TrialCtx& ctx) const {
        // Storage reaches the expanded node's immediate children; beyond that
        // the trial only evaluates (one new node per trial for frontier-based
        // searches).
        return !ctx.expanded || depth <= ctx.expansion_depth + 1;
    }

    void record_state_est(NodeId key, StateId s, double v, int source_depth) {
        if (!local_.contains(key)) return;
        BackupEstimate est{BackupEstimate::Kind::State, s, std::nullopt, v, source_depth};
        local_.record_estimate(key, est, cfg_.update_local);
    }

    void record_action_est(NodeId key, StateId s, ActionId a, double q, int source_depth,
                           TrialCtx& ctx) {
        if (!local_.contains(key)) return;
        BackupEstimate est{BackupEstimate::Kind::StateAction, s, a, q, source_depth};
        local_.record_estimate(key, est, cfg_.update_local);
        if (key == local_.root_key() && ctx.root_actions &&
            std::find(ctx.root_actions->begin(), ctx.root_actions->end(), a) ==
                ctx.root_actions->end())
            ctx.root_actions->push_back(a);
    }

    double visit_state(StateId s, NodeId key, int depth, TrialCtx& ctx) {
        ctx.leaf_depth = std::max(ctx.leaf_depth, depth);
        if (mdp_.is_terminal(s)) {
            ctx.trace.ended_terminal = true;
            return 0.0;
        }
        // Branching trials evaluate each state once; re-entering it (a cycle
        // or a confluence in the envelope) reads the stored value instead of
        // unrolling further.
        if (!ctx.linear && ctx.visited.count(key) > 0) return leaf_state_value(s, key);

        const bool duplicate = local_.is_explored(key) || ctx.visited.count(key) > 0;
        const bool cut =
            depth_reached(cfg_.depth, depth, cfg_.horizon_cap, ctx.expanded, duplicate);
        if (cut) {
            double v;
            if (cfg_.bootstrap.kind == BootstrapKind::None)
                v = rollout_value(s, depth, ctx);
            else if (cfg_.bootstrap.location == BootstrapLocation::State)
                v = leaf_state_value(s, key);
            else
                v = bootstrap_via_actions(s, key);
            record_state_est(key, s, v, 1);
            return v;
        }

        ctx.visited.insert(key);
        const Phase phase =
            local_.is_explored(key) ? Phase::BeforeFrontier : Phase::AfterFrontier;
        if (local_.on_frontier(key)) {
            local_.expand_node(key);
            ctx.expanded = true;
            ctx.expansion_depth = depth;
        }

        ActionId a;
        if (depth == 0 && pending_action_) {
            a = *pending_action_;
            pending_action_.reset();
        } else if (cfg_.budget.kind == TrialBudget::Kind::Exhaustive && depth == 0) {
            // Exhaustive budgets enumerate the root's actions, one per trial.
            a = static_cast<ActionId>(trial_index_ % mdp_.n_actions());
        } else {
            a = choose_action(s, key, phase);
        }

        const double q_hat = visit_action(s, a, key, depth, ctx);
        const double v_hat = cfg_.backup.policy == PolicyBackupKind::OnPolicySample
                                 ? q_hat // the trial's own estimate, not the aggregate
                                 : state_policy_backup(s, key, a, phase, q_hat);
        const int source_depth = std::max(1, ctx.leaf_depth - depth);
        record_state_est(key, s, v_hat, source_depth);
        return v_hat;
    }

    double visit_action(StateId s, ActionId a, NodeId key, int depth, TrialCtx& ctx) {
        double q_hat;
        try {
            QueryResult qr = trial_query(s, a);
            const bool branch_all = cfg_.next_state == NextStateKind::Ordered ||
                                    (cfg_.backup.dynamics == DynamicsBackupKind::Expected &&
                                     qr.distribution.has_value());
            if (branch_all) {
                if (!qr.distribution)
                    throw WrongAccessMode(
                        "expected dynamics back-up needs a descriptive answer");
                ctx.linear = false;
                std::vector<WeightedSuccessor> successors;
                successors.reserve(qr.distribution->size());
                for (const auto& t : *qr.distribution) {
                    const NodeId ck = local_.child_key(key, a, t.next);
                    if (!mdp_.is_terminal(t.next) && storing_at(depth + 1, ctx))
                        local_.touch(ck, t.next);
                    const double v = visit_state(t.next, ck, depth + 1, ctx);
                    successors.push_back({t.prob, t.reward, v});
                }
                q_hat = dynamics_backup_expected(successors, mdp_.gamma());
            } else {
                const auto choice = select_next_state(cfg_.next_state, qr, rng_);
                const NodeId ck = local_.child_key(key, a, choice.next);
                if (!mdp_.is_terminal(choice.next) && storing_at(depth + 1, ctx))
                    local_.touch(ck, choice.next);
                if (ctx.linear) ctx.trace.steps.push_back({s, a, choice.reward, choice.next});
                const double v = visit_state(choice.next, ck, depth + 1, ctx);
                q_hat = dynamics_backup_sample(choice.reward, mdp_.gamma(), v);
            }
        } catch (const UnvisitedPair&) {
            // Unknown territory in a learned model: the trial ends here.
            q_hat = q_bootstrap_available()
                        ? q_bootstrap(s, a)
                        : bootstrap_state(cfg_.bootstrap, s, mdp_.is_terminal(s),
                                          bootstrap_source());
        }
        // Real-interaction visit counts (planning steps do not pass through
        // here, so model-based runs count only real experience).
        if (has_global_ && global_.has_counts) {
            ++global_.counts_s[s];
            ++global_.count_sa_at(s, a);
        }
        record_action_est(key, s, a, q_hat, std::max(1, ctx.leaf_depth - depth), ctx);
        return q_hat;
    }

    /// Aggregate the state's child values after the chosen action returned
    /// (greedy / expected policy back-ups read the updated local aggregates,
    /// falling back to bootstrap values for untried actions).
    double state_policy_backup(StateId s, NodeId key, ActionId chosen, Phase phase,
                               double fallback) {
        const auto* node = local_.find(key);
        std::map<ActionId, double> q_children;
        for (ActionId a = 0; a < mdp_.n_actions(); ++a) {
            if (node && node->n_sa[a] > 0)
                q_children.emplace(a, node->q_agg[a]);
            else if (q_bootstrap_available())
                q_children.emplace(a, q_bootstrap(s, a));
        }
        if (q_children.empty()) return fallback; // unstored node: sample estimate
        if (cfg_.backup.policy == PolicyBackupKind::Expected) {
            const auto behavior = behavior_probs(s, key, phase);
            std::map<ActionId, double> probs;
            for (std::size_t a = 0; a < behavior.size(); ++a)
                probs[static_cast<ActionId>(a)] = behavior[a];
            return policy_backup(PolicyBackupKind::Expected, q_children, chosen, &probs);
        }
        return policy_backup(cfg_.backup.policy, q_children, chosen, nullptr);
    }

    /// Trial cut at a state-action pair: the state condition is checked
    /// first, so this runs only for state-action-located bootstraps. Yields
    /// the Q-learning max target, the expected-SARSA target, or the SARSA
    /// on-policy draw (carried over as the next root's first action).
    double bootstrap_via_actions(StateId s, NodeId key) {
        switch (cfg_.backup.policy) {
            case PolicyBackupKind::GreedyMax: {
                std::map<ActionId, double> q_children;
                const auto* node = local_.find(key);
                for (ActionId a = 0; a < mdp_.n_actions(); ++a)
                    q_children.emplace(
                        a, node && node->n_sa[a] > 0 ? node->q_agg[a] : q_bootstrap(s, a));
                return policy_backup(PolicyBackupKind::GreedyMax, q_children);
            }
            case PolicyBackupKind::Expected: {
                const auto probs = behavior_probs(s, key, Phase::AfterFrontier);
                double v = 0.0;
                for (ActionId a = 0; a < mdp_.n_actions(); ++a)
                    v += probs[a] * q_bootstrap(s, a);
                return v;
            }
            case PolicyBackupKind::OnPolicySample: {
                const Phase phase =
                    local_.is_explored(key) ? Phase::BeforeFrontier : Phase::AfterFrontier;
                const ActionId a = choose_action(s, key, phase);
                if (handle_.mode() == AccessMode::ResettableGenerative) pending_action_ = a;
                return q_bootstrap(s, a);
            }
        }
        return 0.0;
    }

    /// Monte Carlo continuation from a cut state: follow the after-frontier
    /// rule to a terminal state or the horizon cap; the chain of sample
    /// back-ups collapses to the discounted return. Nothing below the cut is
    /// stored.
    double rollout_value(StateId s, int depth, TrialCtx& ctx) {
        double g = 0.0;
        double disc = 1.0;
        StateId cur = s;
        int d = depth;
        while (!mdp_.is_terminal(cur) && d < cfg_.horizon_cap) {
            const ActionId a = choose_action(cur, local_.state_key(cur), Phase::AfterFrontier);
            QueryResult qr = trial_query(cur, a);
            const auto choice = select_next_state(NextStateKind::Sample, qr, rng_);
            if (ctx.linear) ctx.trace.steps.push_back({cur, a, choice.reward, choice.next});
            g += disc * choice.reward;
            disc *= mdp_.gamma();
            cur = choice.next;
            ++d;
        }
        ctx.leaf_depth = std::max(ctx.leaf_depth, d);
        if (mdp_.is_terminal(cur)) ctx.trace.ended_terminal = true;
        return g;
    }

    // --- outer loop -----------------------------------------------------------

    StateId first_root() {
        if (forward_real_roots()) {
            reset_episode();
            return handle_.reset();
        }
        switch (cfg_.root_kind) {
            case RootKind::Ordered: return 0;
            case RootKind::ForwardSampling:
            case RootKind::BackwardSampling:
            case RootKind::VisitedSet: return sample_p0();
        }
        return 0;
    }

    /// The next root, or nullopt when the strategy is exhausted.
    std::optional<StateId> next_root() {
        if (forward_real_roots()) {
            StateId cur = handle_.current_state();
            if (mdp_.is_terminal(cur)) {
                reset_episode();
                cur = handle_.reset();
            }
            return cur;
        }
        switch (cfg_.root_kind) {
            case RootKind::Ordered: {
                strategy_.cursor = (strategy_.cursor + 1) % mdp_.n_states();
                return strategy_.cursor;
            }
            case RootKind::ForwardSampling: {
                // Simulated move: execute a next-root action from the old root.
                const StateId root = local_.root();
                if (mdp_.is_terminal(root)) return sample_p0();
                const ActionId a = choose_action(root, local_.root_key(), Phase::NextRoot);
                QueryResult qr = handle_.mode() == AccessMode::SettableDescriptive
                                     ? handle_.query_descriptive(root, a)
                                     : handle_.query_generative(root, a);
                const auto choice = select_next_state(NextStateKind::Sample, qr, rng_);
                StateId next = choice.next;
                if (mdp_.is_terminal(next) || is_labeled_solved(next)) next = sample_p0();
                return next;
            }
            case RootKind::BackwardSampling: {
                if (!strategy_.queue || strategy_.queue->empty()) return std::nullopt;
                return strategy_.queue->pop();
            }
            case RootKind::VisitedSet: {
                if (strategy_.visited_order.empty()) return sample_p0();
                if (strategy_.sampling == VisitedSampling::Recency)
                    return strategy_.visited_order.back();
                return strategy_.visited_order[rng_.index(
                    static_cast<int>(strategy_.visited_order.size()))];
            }
        }
        return std::nullopt;
    }

    bool is_labeled_solved(StateId s) const {
        if (!cfg_.backup.extras.solved_labels) return false;
        if (has_global_ && global_.has_solved && global_.solved.count(s)) return true;
        if (const auto* node = local_.find(local_.state_key(s))) return node->solved;
        return false;
    }

    void run_label_check(StateId root) {
        if (!cfg_.backup.extras.solved_labels) return;
        if (handle_.mode() != AccessMode::SettableDescriptive) return;
        ValueView view;
        view.get = [this](StateId s) {
            const auto* node = local_.find(local_.state_key(s));
            if (node && node->n_s > 0) return node->v_agg;
            if (has_global_ && global_.has_v) return global_.v[s];
            return bootstrap_state(cfg_.bootstrap, s, false, bootstrap_source());
        };
        view.set = [this](StateId s, double v) {
            auto& node = local_.touch(local_.state_key(s), s);
            node.v_agg = v;
            ++node.n_s;
            if (has_global_ && global_.has_v) global_.v[s] = v;
        };
        view.is_solved = [this](StateId s) {
            if (has_global_ && global_.has_solved && global_.solved.count(s)) return true;
            const auto* node = local_.find(local_.state_key(s));
            return node && node->solved;
        };
        view.mark_solved = [this](StateId s) {
            local_.touch(local_.state_key(s), s).solved = true;
            if (has_global_) global_.solved.insert(s);
            solved_states_.insert(s);
        };
        check_solved(root, handle_, mdp_.gamma(), cfg_.label_tol, view);
    }

    bool initial_states_solved() const {
        if (!cfg_.backup.extras.solved_labels) return false;
        if (mdp_.initial_dist().empty()) return false;
        for (const auto& [s, p] : mdp_.initial_dist())
            if (!solved_states_.count(s)) return false;
        return true;
    }

    double greedy_global_value(StateId s) const {
        if (mdp_.is_terminal(s)) return 0.0;
        if (global_.has_v) return global_.v[s];
        if (!global_.has_q) return 0.0;
        double best = -std::numeric_limits<double>::infinity();
        for (ActionId a = 0; a < global_.n_actions; ++a)
            best = std::max(best, global_.q_at(s, a));
        return best;
    }

    /// Fold the root's local estimates into the global tables; returns the
    /// magnitude of the root's state-value change.
    double apply_global_update(StateId root, const std::vector<ActionId>& root_actions) {
        if (!cfg_.update_global || mdp_.is_terminal(root)) return 0.0;
        const GlobalUpdateRule& rule = *cfg_.update_global;
        const double before = greedy_global_value(root);
        const double eta_now =
            decay_learning_rate(cfg_.schedule, rule.eta, cfg_.schedule_t0, global_step_++);

        if (rule.kind == GlobalUpdateRule::Kind::PolicyGradientSoftmax) {
            if (!local_.trace_buffer.empty())
                policy_gradient_update(rule, global_, local_.trace_buffer.back(), eta_now);
            return 0.0;
        }
        const auto* node = local_.find(local_.root_key());
        if (!node) return 0.0;
        if (global_.has_v && node->n_s > 0)
            global_tabular_update(rule, global_, root, std::nullopt, node->v_agg, eta_now);
        if (global_.has_q)
            for (ActionId a : root_actions)
                global_tabular_update(rule, global_, root, a, node->q_agg[a], eta_now);
        return std::abs(greedy_global_value(root) - before);
    }

    void push_predecessor_priorities(StateId s, double delta) {
        if (!cfg_.backup.extras.priorities || !model_) return;
        if (delta <= 0.0) return;
        push_priority(strategy_, delta, model_->predecessors(s));
    }

    /// Asynchronous expected back-up at `s` over every action the model has
    /// data for. Returns |change| of the state's greedy value.
    double expected_model_update(StateId s) {
        const double before = greedy_global_value(s);
        const double eta_now = cfg_.update_global->eta;
        for (ActionId a = 0; a < mdp_.n_actions(); ++a) {
            if (!model_->visited(s, a)) continue;
            const auto dist = model_->estimate(s, a);
            ++model_queries_;
            double q = 0.0;
            for (const auto& t : dist) {
                const double v = mdp_.is_terminal(t.next) ? 0.0 : greedy_global_value(t.next);
                q += t.prob * (t.reward + mdp_.gamma() * v);
            }
            global_tabular_update(*cfg_.update_global, global_, s, a, q, eta_now);
        }
        return std::abs(greedy_global_value(s) - before);
    }

    /// Planning over the learned model: depth-1 back-ups at queue / visited
    /// roots (the Dyna and prioritized-sweeping planning step).
    void planning_phase() {
        if (!model_ || !cfg_.update_global) return;
        const double eta_now = cfg_.update_global->eta;
        for (int k = 0; k < cfg_.planning_steps; ++k) {
            StateId ps;
            if (cfg_.root_kind == RootKind::BackwardSampling) {
                if (!strategy_.queue || strategy_.queue->empty()) break;
                ps = strategy_.queue->pop();
            } else {
                if (strategy_.visited_order.empty()) break;
                ps = strategy_.visited_order[rng_.index(
                    static_cast<int>(strategy_.visited_order.size()))];
            }
            if (mdp_.is_terminal(ps) || !model_->state_known(ps)) continue;

            if (cfg_.planning_expected) {
                push_predecessor_priorities(ps, expected_model_update(ps));
                continue;
            }
            // One sampled back-up at a uniformly drawn observed action.
            const double before = greedy_global_value(ps);
            std::vector<ActionId> known;
            for (ActionId a = 0; a < mdp_.n_actions(); ++a)
                if (model_->visited(ps, a)) known.push_back(a);
            const ActionId a = known[rng_.index(static_cast<int>(known.size()))];
            const auto dist = model_->estimate(ps, a);
            ++model_queries_;
            double u = rng_.uniform();
            const Transition* chosen = &dist.back();
            for (const auto& t : dist) {
                u -= t.prob;
                if (u < 0.0) {
                    chosen = &t;
                    break;
                }
            }
            const double v =
                mdp_.is_terminal(chosen->next) ? 0.0 : greedy_global_value(chosen->next);
            const double target = chosen->reward + mdp_.gamma() * v;
            global_tabular_update(*cfg_.update_global, global_, ps, a, target, eta_now);
            push_predecessor_priorities(ps, std::abs(greedy_global_value(ps) - before));
        }
    }

    // --- episodic eligibility mode ------------------------------------------
    // One real episode is sampled, then roots advance along it reusing the
    // stored trace (each trace state becomes a root once).

    bool trace_walk_mode() const {
        return cfg_.update_local.kind == LocalUpdateRule::Kind::Eligibility &&
               handle_.mode() == AccessMode::ResettableGenerative;
    }

    void sample_episode() {
        TraceRecord trace;
        StateId cur = handle_.current_state();
        if (cur < 0 || mdp_.is_terminal(cur)) {
            reset_episode();
            cur = handle_.reset();
        }
        int steps = 0;
        while (!mdp_.is_terminal(cur) && steps < cfg_.horizon_cap) {
            const ActionId a = choose_action(cur, local_.state_key(cur), Phase::BeforeFrontier);
            auto [next, reward, terminal] = handle_.step(a);
            note_real_reward(reward, terminal);
            trace.steps.push_back({cur, a, reward, next});
            cur = next;
            ++steps;
        }
        trace.depth = steps;
        trace.ended_terminal = mdp_.is_terminal(cur);
        trace.return_estimates.assign(static_cast<std::size_t>(steps) + 1, 0.0);
        for (int t = steps - 1; t >= 0; --t)
            trace.return_estimates[t] =
                trace.steps[t].reward + mdp_.gamma() * trace.return_estimates[t + 1];
        local_.trace_buffer.clear();
        local_.trace_buffer.push_back(std::move(trace));
        trace_position_ = 0;
        // The return is reported at the iteration that processes the final
        // position, matching the online one-step attribution.
        if (episode_done_) {
            pending_episode_return_ = completed_return_;
            episode_done_ = false;
            completed_return_ = kNan;
            episode_acc_ = 0.0;
            episode_disc_ = 1.0;
        }
    }

    /// Eligibility-weighted mixture of the 1..D step bootstrapped returns for
    /// the trace suffix at `position`; the truncation tail weight goes to the
    /// deepest target.
    double lambda_return_at(const TraceRecord& trace, int position) {
        const int suffix = trace.depth - position;
        const auto weights = eligibility_weights(cfg_.update_local.lambda, suffix);
        double acc = 0.0;
        double prefix = 0.0; // discounted rewards before the bootstrap step
        double disc = 1.0;
        for (int d = 1; d <= suffix; ++d) {
            const TraceStep& step = trace.steps[position + d - 1];
            const double leaf = mdp_.is_terminal(step.next_state)
                                    ? 0.0
                                    : bootstrap_state(cfg_.bootstrap, step.next_state, false,
                                                      bootstrap_source());
            const double g_d =
                prefix + disc * dynamics_backup_sample(step.reward, mdp_.gamma(), leaf);
            acc += weights[d - 1] * g_d;
            prefix += disc * step.reward;
            disc *= mdp_.gamma();
        }
        return acc;
    }

    RootRecord trace_walk_iteration(StateId& root) {
        if (local_.trace_buffer.empty() || trace_position_ >= local_.trace_buffer.back().depth)
            sample_episode();
        const TraceRecord& trace = local_.trace_buffer.back();
        RootRecord row;
        row.root = root;
        if (trace.depth == 0) return row;

        root = trace.state_at(trace_position_);
        row.root = root;
        row.trials = 1;

        const double target = lambda_return_at(trace, trace_position_);
        auto& node = local_.touch(local_.state_key(root), root);
        const double old_local = node.v_agg;
        BackupEstimate est{BackupEstimate::Kind::State, root, std::nullopt, target, 1};
        local_.record_estimate(local_.state_key(root), est, LocalUpdateRule::replace());
        row.residual = std::abs(target - old_local);
        row.v_root = target;

        if (cfg_.update_global && global_.has_v) {
            const double eta_now = decay_learning_rate(cfg_.schedule, cfg_.update_global->eta,
                                                       cfg_.schedule_t0, global_step_++);
            global_tabular_update(*cfg_.update_global, global_, root, std::nullopt, target,
                                  eta_now);
        }
        ++trace_position_;
        if (trace_position_ >= trace.depth && !std::isnan(pending_episode_return_)) {
            row.episode_return = pending_episode_return_;
            pending_episode_return_ = kNan;
        }
        return row;
    }

    // --- members --------------------------------------------------------------

    AlgorithmConfig cfg_; // run-resolved copy
    AccessHandle& handle_;
    const TabularMdp& mdp_;
    Rng rng_;
    std::uint64_t seed_;
    bool record_timings_;

    bool has_global_ = false;
    GlobalSolution global_;
    GlobalSolution frozen_; // sync-sweep bootstrap source
    LocalSolution local_;
    RootStrategy strategy_;
    std::optional<LearnedTabularModel> model_;

    std::optional<ActionId> pending_action_; // on-policy bootstrap carry (SARSA)
    double episode_acc_ = 0.0;
    double episode_disc_ = 1.0;
    bool episode_done_ = false;
    double completed_return_ = kNan;
    double pending_episode_return_ = kNan; // trace-walk attribution

    std::set<StateId> solved_states_;
    long global_step_ = 0;
    long trial_index_ = 0;
    long outer_iter_ = 0;
    long model_queries_ = 0;
    int trace_position_ = 0;

    friend RunResult run_impl(EngineRun&, long);
};

RunResult run_impl(EngineRun& er, long root_budget);

RunResult EngineRun::execute(long root_budget) { return run_impl(*this, root_budget); }

RunResult run_impl(EngineRun& er, long root_budget) {
    const auto wall_start = std::chrono::steady_clock::now();
    const AlgorithmConfig& cfg = er.cfg_;
    const TabularMdp& mdp = er.mdp_;
    if (root_budget <= 0) root_budget = cfg.default_root_budget;

    RunResult result;
    result.seed = er.seed_;
    result.config_echo = config_echo(cfg);

    StateId root = er.first_root();
    er.local_ = init_local(root, nullptr, false, er.local_options());
    if (er.has_global_ && cfg.sync_sweep) er.frozen_ = er.global_;

    double sweep_residual = 0.0;
    bool converged = false;
    bool exhausted = false;

    for (long iter = 0; iter < root_budget; ++iter) {
        er.outer_iter_ = iter;
        const auto row_start = std::chrono::steady_clock::now();
        RootRecord row;

        if (er.trace_walk_mode()) {
            row = er.trace_walk_iteration(root);
        } else if (mdp.is_terminal(root)) {
            row.root = root;
        } else {
            row.root = root;
            er.strategy_.note_visited(root);
            std::vector<ActionId> root_actions;
            long trials_done = 0;
            double residual = std::numeric_limits<double>::infinity();
            EngineRun::TrialCtx last_ctx;
            er.trial_index_ = 0;
            while (trials_remaining(cfg.budget, trials_done, residual)) {
                EngineRun::TrialCtx ctx;
                ctx.root_actions = &root_actions;
                const auto* before_node = er.local_.find(er.local_.root_key());
                const double v_before = before_node ? before_node->v_agg : 0.0;
                er.visit_state(root, er.local_.root_key(), 0, ctx);
                const auto* after_node = er.local_.find(er.local_.root_key());
                const double v_after = after_node ? after_node->v_agg : 0.0;
                residual = std::abs(v_after - v_before);
                ++trials_done;
                ++er.trial_index_;
                ctx.trace.depth = static_cast<int>(ctx.trace.steps.size());
                last_ctx = std::move(ctx);
            }
            // A completed linear trace feeds the episodic global updates and
            // the learned model.
            if (last_ctx.linear && !last_ctx.trace.steps.empty()) {
                TraceRecord trace = last_ctx.trace;
                trace.return_estimates.assign(static_cast<std::size_t>(trace.depth) + 1, 0.0);
                for (int t = trace.depth - 1; t >= 0; --t)
                    trace.return_estimates[t] =
                        trace.steps[t].reward + mdp.gamma() * trace.return_estimates[t + 1];
                er.local_.trace_buffer.clear();
                er.local_.trace_buffer.push_back(std::move(trace));
            }
            if (er.model_)
                for (const auto& st : last_ctx.trace.steps)
                    er.model_->observe(st.state, st.action, st.next_state, st.reward,
                                       mdp.is_terminal(st.next_state));

            const auto* node = er.local_.find(er.local_.root_key());
            row.trials = trials_done;
            row.residual = residual;
            row.v_root = node ? node->v_agg : 0.0;

            // Expected-planning configurations re-plan the real root over the
            // model instead of writing the noisy sampled target.
            const double delta = (er.model_ && cfg.planning_expected)
                                     ? er.expected_model_update(root)
                                     : er.apply_global_update(root, root_actions);
            er.push_predecessor_priorities(root, delta);
            if (cfg.sync_sweep) sweep_residual = std::max(sweep_residual, delta);

            er.planning_phase();
            er.run_label_check(root);
        }

        row.iter = iter;
        if (er.episode_done_ && !er.trace_walk_mode()) {
            row.episode_return = er.completed_return_;
            er.episode_done_ = false;
            er.completed_return_ = kNan;
            er.episode_acc_ = 0.0;
            er.episode_disc_ = 1.0;
        }
        row.query_count = er.handle_.query_count();
        if (er.record_timings_)
            row.wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          row_start)
                    .count();
        result.roots.push_back(row);

        // Ordered sweeps: convergence check and frozen-table refresh.
        if (cfg.root_kind == RootKind::Ordered && (iter + 1) % mdp.n_states() == 0) {
            if (!cfg.sync_sweep) {
                sweep_residual = 0.0;
                const std::size_t n = static_cast<std::size_t>(mdp.n_states());
                for (std::size_t k = result.roots.size() - n; k < result.roots.size(); ++k)
                    sweep_residual = std::max(sweep_residual, result.roots[k].residual);
            }
            if (cfg.sync_sweep && er.has_global_ && er.global_.has_v)
                result.sweep_tables.push_back(er.global_.v);
            if (sweep_residual <= cfg.outer_tol) converged = true;
            if (cfg.sync_sweep) er.frozen_ = er.global_;
            sweep_residual = 0.0;
            if (converged) {
                result.outer_iterations = iter + 1;
                break;
            }
        }
        if (er.initial_states_solved()) {
            result.solved_root = true;
            result.outer_iterations = iter + 1;
            break;
        }

        if (iter + 1 >= root_budget) break; // keep the final local store intact
        if (!er.trace_walk_mode()) {
            const auto next = er.next_root();
            if (!next) {
                exhausted = true;
                result.outer_iterations = iter + 1;
                break;
            }
            root = *next;
            er.local_ = init_local(root, &er.local_, cfg.reuse_local, er.local_options());
        }
    }
    (void)exhausted;

    result.converged = converged;
    if (result.outer_iterations == 0)
        result.outer_iterations = static_cast<long>(result.roots.size());
    result.query_count = er.handle_.query_count();
    result.model_query_count = er.model_queries_;
    result.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start)
            .count();

    // Final snapshot: the global tables as they stand, or the local store
    // projected onto states for planning (local-coverage) runs.
    if (er.has_global_) {
        result.global = er.global_;
    } else {
        GlobalSolution snap;
        snap.n_states = mdp.n_states();
        snap.n_actions = mdp.n_actions();
        snap.has_v = true;
        snap.has_q = true;
        snap.has_counts = true;
        snap.has_solved = true;
        snap.v.assign(static_cast<std::size_t>(mdp.n_states()), 0.0);
        snap.q.assign(static_cast<std::size_t>(mdp.n_states()) * mdp.n_actions(), 0.0);
        snap.counts_s.assign(static_cast<std::size_t>(mdp.n_states()), 0);
        snap.counts_sa.assign(static_cast<std::size_t>(mdp.n_states()) * mdp.n_actions(), 0);
        for (const auto& [key, node] : er.local_.nodes()) {
            if (er.local_.tree_mode() && key != er.local_.root_key()) continue;
            snap.v[node.state] = node.v_agg;
            snap.counts_s[node.state] = node.n_s;
            for (ActionId a = 0; a < mdp.n_actions(); ++a) {
                snap.q_at(node.state, a) = node.q_agg[a];
                snap.count_sa_at(node.state, a) = node.n_sa[a];
            }
            if (node.solved) snap.solved.insert(node.state);
        }
        result.global = std::move(snap);
    }
    result.final_local = std::move(er.local_);
    return result;
}

} // namespace

RunResult run(const AlgorithmConfig& config, AccessHandle& handle, long root_budget,
              std::uint64_t seed, bool record_timings) {
    validate_config(config, handle.mode());
    EngineRun er(config, handle, seed, record_timings);
    return er.execute(root_budget);
}

} // namespace frap

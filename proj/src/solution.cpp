#include "frap/solution.hpp"

#include <algorithm>
#include <cmath>

#include "frap/rng.hpp"
#include "json.hpp"

namespace frap {

std::vector<double> GlobalSolution::policy_probs(StateId s) const {
    std::vector<double> probs(static_cast<std::size_t>(n_actions));
    const std::size_t base = static_cast<std::size_t>(s) * n_actions;
    double hi = policy_logits[base];
    for (int a = 1; a < n_actions; ++a) hi = std::max(hi, policy_logits[base + a]);
    double total = 0.0;
    for (int a = 0; a < n_actions; ++a) {
        probs[a] = std::exp(policy_logits[base + a] - hi);
        total += probs[a];
    }
    for (double& p : probs) p /= total;
    return probs;
}

std::string GlobalSolution::snapshot_json() const {
    nlohmann::json j;
    if (has_v) j["v"] = v;
    if (has_q) {
        auto rows = nlohmann::json::array();
        for (StateId s = 0; s < n_states; ++s) {
            auto row = nlohmann::json::array();
            for (ActionId a = 0; a < n_actions; ++a) row.push_back(q_at(s, a));
            rows.push_back(row);
        }
        j["q"] = rows;
    }
    if (has_policy) {
        auto rows = nlohmann::json::array();
        for (StateId s = 0; s < n_states; ++s) j["policy"].push_back(policy_probs(s));
        (void)rows;
    }
    if (has_counts) {
        j["counts"] = counts_s;
    }
    if (has_solved) j["solved"] = std::vector<StateId>(solved.begin(), solved.end());
    return j.dump();
}

GlobalSolution init_global(const SolutionSpec& spec, int n_states, int n_actions,
                           const std::function<double(StateId)>* heuristic) {
    GlobalSolution g;
    g.n_states = n_states;
    g.n_actions = n_actions;
    switch (spec.type) {
        case SolutionType::V: g.has_v = true; break;
        case SolutionType::Q: g.has_q = true; break;
        case SolutionType::Policy: g.has_policy = true; break;
        case SolutionType::ActorCritic:
            g.has_policy = true;
            g.has_v = true;
            break;
    }
    g.has_counts = true;
    g.has_solved = true;

    const std::size_t nv = static_cast<std::size_t>(n_states);
    const std::size_t nq = nv * n_actions;
    auto fill = [&](std::vector<double>& table, std::size_t size, bool per_state) {
        switch (spec.init.kind) {
            case InitScheme::Kind::Uniform:
            case InitScheme::Kind::Optimistic:
                table.assign(size, spec.init.value);
                break;
            case InitScheme::Kind::Random: {
                Rng rng(spec.init.seed);
                table.resize(size);
                for (double& x : table) x = (rng.uniform() * 2.0 - 1.0) * spec.init.scale;
                break;
            }
            case InitScheme::Kind::Heuristic: {
                if (!heuristic)
                    throw UnsupportedInit("heuristic init requested without a heuristic");
                table.resize(size);
                for (std::size_t i = 0; i < size; ++i) {
                    const StateId s = static_cast<StateId>(per_state ? i : i / n_actions);
                    table[i] = (*heuristic)(s);
                }
                break;
            }
        }
    };
    if (g.has_v) fill(g.v, nv, true);
    if (g.has_q) fill(g.q, nq, false);
    if (g.has_policy) g.policy_logits.assign(nq, 0.0);
    g.counts_s.assign(nv, 0);
    g.counts_sa.assign(nq, 0);
    return g;
}

LocalSolution::LocalSolution(StateId root, Options options)
    : root_(root), options_(std::move(options)) {
    root_key_ = options_.tree_mode ? 0x517cc1b727220a95ULL : state_key(root);
    touch(root_key_, root);
}

NodeId LocalSolution::child_key(NodeId parent, ActionId a, StateId next) const {
    if (!options_.tree_mode) return state_key(next);
    NodeId h = parent;
    h ^= (static_cast<NodeId>(a) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    h ^= (static_cast<NodeId>(next) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    return h;
}

LocalSolution::Node& LocalSolution::node(NodeId key) { return nodes_.at(key); }
const LocalSolution::Node& LocalSolution::node(NodeId key) const { return nodes_.at(key); }
LocalSolution::Node* LocalSolution::find(NodeId key) {
    auto it = nodes_.find(key);
    return it == nodes_.end() ? nullptr : &it->second;
}
const LocalSolution::Node* LocalSolution::find(NodeId key) const {
    auto it = nodes_.find(key);
    return it == nodes_.end() ? nullptr : &it->second;
}

LocalSolution::Node& LocalSolution::touch(NodeId key, StateId s) {
    auto it = nodes_.find(key);
    if (it != nodes_.end()) return it->second;
    Node n;
    n.state = s;
    n.v_agg = options_.v_init ? options_.v_init(s) : 0.0;
    n.q_agg.resize(static_cast<std::size_t>(options_.n_actions));
    for (ActionId a = 0; a < options_.n_actions; ++a)
        n.q_agg[a] = options_.q_init ? options_.q_init(s, a) : 0.0;
    n.n_sa.assign(static_cast<std::size_t>(options_.n_actions), 0);
    frontier_.insert(key);
    return nodes_.emplace(key, std::move(n)).first->second;
}

void LocalSolution::expand_node(NodeId key) {
    auto it = frontier_.find(key);
    if (it == frontier_.end())
        throw NotOnFrontier("node " + std::to_string(key) + " is not on the frontier");
    frontier_.erase(it);
    explored_.insert(key);
}

void LocalSolution::record_estimate(NodeId key, const BackupEstimate& est,
                                    const LocalUpdateRule& rule) {
    Node& n = node(key);
    if (est.kind == BackupEstimate::Kind::State) {
        ++n.n_s;
        n.v_agg = local_update(rule, n.v_agg, est.value, n.n_s, est.source_depth);
    } else {
        const ActionId a = *est.a;
        ++n.n_sa[a];
        n.q_agg[a] = local_update(rule, n.q_agg[a], est.value, n.n_sa[a], est.source_depth);
    }
}

ActionId LocalSolution::recommend_action(NodeId key, Recommend mode) const {
    const Node& n = node(key);
    ActionId best = -1;
    double best_score = 0.0;
    for (ActionId a = 0; a < static_cast<ActionId>(n.q_agg.size()); ++a) {
        if (n.n_sa[a] <= 0) continue;
        const double score =
            mode == Recommend::MaxValue ? n.q_agg[a] : static_cast<double>(n.n_sa[a]);
        if (best < 0 || score > best_score) {
            best = a;
            best_score = score;
        }
    }
    if (best < 0)
        throw NoVisitedChildren("no visited child action at state " + std::to_string(n.state));
    return best;
}

std::string LocalSolution::snapshot_json() const {
    nlohmann::json j;
    auto nodes = nlohmann::json::array();
    for (const auto& [key, n] : nodes_) {
        nlohmann::json e;
        e["state"] = n.state;
        e["v"] = n.v_agg;
        e["q"] = n.q_agg;
        e["n_s"] = n.n_s;
        e["n_sa"] = n.n_sa;
        e["solved"] = n.solved;
        nodes.push_back(e);
    }
    j["nodes"] = nodes;
    j["n_frontier"] = frontier_.size();
    j["n_explored"] = explored_.size();
    return j.dump();
}

void LocalSolution::rebase(StateId new_root) {
    root_ = new_root;
    root_key_ = options_.tree_mode ? 0x517cc1b727220a95ULL : state_key(new_root);
    touch(root_key_, new_root);
}

LocalSolution init_local(StateId root, const LocalSolution* carryover, bool reuse,
                         LocalSolution::Options options) {
    if (carryover && reuse) {
        LocalSolution out = *carryover;
        out.rebase(root);
        return out;
    }
    return LocalSolution(root, std::move(options));
}

} // namespace frap

#include "frap/model.hpp"

#include <cstdio>
#include <sstream>

namespace frap {

LearnedTabularModel::LearnedTabularModel(int n_states, int n_actions)
    : n_states_(n_states), n_actions_(n_actions),
      edges_(static_cast<std::size_t>(n_states) * n_actions),
      totals_(static_cast<std::size_t>(n_states) * n_actions, 0), reverse_(n_states) {}

void LearnedTabularModel::observe(StateId s, ActionId a, StateId next, double reward,
                                  bool terminal) {
    Edge& e = edges_[index(s, a)][next];
    ++e.count;
    e.reward_sum += reward;
    ++totals_[index(s, a)];
    reverse_[next].insert({s, a});
    if (terminal) terminals_seen_.insert(next);
}

long LearnedTabularModel::total(StateId s, ActionId a) const { return totals_[index(s, a)]; }

bool LearnedTabularModel::state_known(StateId s) const {
    for (ActionId a = 0; a < n_actions_; ++a)
        if (totals_[index(s, a)] > 0) return true;
    return false;
}

std::vector<Transition> LearnedTabularModel::estimate(StateId s, ActionId a) const {
    const long total = totals_[index(s, a)];
    if (total == 0)
        throw UnvisitedPair("(" + std::to_string(s) + "," + std::to_string(a) +
                            ") has no observations");
    std::vector<Transition> out;
    out.reserve(edges_[index(s, a)].size());
    for (const auto& [next, e] : edges_[index(s, a)])
        out.push_back({next, static_cast<double>(e.count) / static_cast<double>(total),
                       e.reward_sum / static_cast<double>(e.count)});
    return out;
}

std::vector<Predecessor> LearnedTabularModel::predecessors(StateId next) const {
    std::vector<Predecessor> out;
    for (const auto& [s, a] : reverse_[next]) {
        const auto& e = edges_[index(s, a)].at(next);
        out.push_back({s, a,
                       static_cast<double>(e.count) / static_cast<double>(totals_[index(s, a)])});
    }
    return out;
}

std::string LearnedTabularModel::dump() const {
    std::ostringstream out;
    out << "# learned\n";
    out << "mdp " << n_states_ << " " << n_actions_ << " 1\n";
    for (StateId s : terminals_seen_) out << "terminal " << s << "\n";
    char buf[64];
    for (StateId s = 0; s < n_states_; ++s) {
        for (ActionId a = 0; a < n_actions_; ++a) {
            const long total = totals_[index(s, a)];
            if (total == 0) continue;
            for (const auto& [next, e] : edges_[index(s, a)]) {
                out << "t " << s << " " << a << " " << next << " ";
                std::snprintf(buf, sizeof(buf), "%.17g",
                              static_cast<double>(e.count) / static_cast<double>(total));
                out << buf << " ";
                std::snprintf(buf, sizeof(buf), "%.17g",
                              e.reward_sum / static_cast<double>(e.count));
                out << buf << "\n";
            }
        }
    }
    return out.str();
}

} // namespace frap

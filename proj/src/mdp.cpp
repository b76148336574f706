#include "frap/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace frap {

namespace {

constexpr double kProbTol = 1e-9;

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void TabularMdp::add_transition(StateId s, ActionId a, StateId next, double prob, double reward) {
    if (s < 0 || s >= n_states_ || next < 0 || next >= n_states_)
        throw ValidationError("state index out of range in transition (" + std::to_string(s) +
                              "," + std::to_string(a) + "," + std::to_string(next) + ")");
    if (a < 0 || a >= n_actions_)
        throw ValidationError("action index out of range: " + std::to_string(a));
    transitions_[index(s, a)].push_back({next, prob, reward});
}

double TabularMdp::max_reward() const {
    double r = 0.0;
    for (const auto& list : transitions_)
        for (const auto& t : list) r = std::max(r, std::abs(t.reward));
    return r;
}

bool TabularMdp::all_rewards_negative() const {
    bool any = false;
    for (const auto& list : transitions_)
        for (const auto& t : list) {
            any = true;
            if (t.reward >= 0.0) return false;
        }
    return any;
}

void TabularMdp::validate(std::vector<std::string>* warnings) {
    if (n_states_ <= 0) throw ValidationError("n_states must be positive");
    if (n_actions_ <= 0) throw ValidationError("n_actions must be positive");
    if (gamma_ < 0.0 || gamma_ > 1.0) throw ValidationError("gamma must lie in [0,1]");
    for (StateId s : terminals_)
        if (s < 0 || s >= n_states_)
            throw ValidationError("terminal state out of range: " + std::to_string(s));

    for (StateId s = 0; s < n_states_; ++s) {
        for (ActionId a = 0; a < n_actions_; ++a) {
            auto& list = transitions_[index(s, a)];
            if (list.empty()) {
                if (!is_terminal(s))
                    throw ValidationError("no transitions for (" + std::to_string(s) + "," +
                                          std::to_string(a) + ") at a non-terminal state");
                continue;
            }
            if (is_terminal(s))
                throw ValidationError("terminal state " + std::to_string(s) +
                                      " has outgoing transitions");
            // Merge multi-edges to the same successor: probabilities summed,
            // rewards probability-weighted.
            std::vector<Transition> merged;
            for (const auto& t : list) {
                if (t.prob <= 0.0)
                    throw ValidationError("nonpositive probability on (" + std::to_string(s) +
                                          "," + std::to_string(a) + ")");
                if (!std::isfinite(t.reward))
                    throw ValidationError("non-finite reward on (" + std::to_string(s) + "," +
                                          std::to_string(a) + ")");
                auto it = std::find_if(merged.begin(), merged.end(),
                                       [&](const Transition& m) { return m.next == t.next; });
                if (it == merged.end()) {
                    merged.push_back(t);
                } else {
                    if (warnings)
                        warnings->push_back("merged duplicate edge (" + std::to_string(s) + "," +
                                            std::to_string(a) + ") -> " + std::to_string(t.next));
                    const double p = it->prob + t.prob;
                    it->reward = (it->reward * it->prob + t.reward * t.prob) / p;
                    it->prob = p;
                }
            }
            double mass = 0.0;
            for (const auto& t : merged) mass += t.prob;
            if (std::abs(mass - 1.0) > kProbTol)
                throw ValidationError("probability mass of (" + std::to_string(s) + "," +
                                      std::to_string(a) + ") sums to " + format_real(mass));
            list = std::move(merged);
        }
    }

    if (initial_dist_.empty()) throw ValidationError("initial distribution is empty");
    double mass = 0.0;
    for (const auto& [s, p] : initial_dist_) {
        if (s < 0 || s >= n_states_)
            throw ValidationError("initial state out of range: " + std::to_string(s));
        if (p <= 0.0) throw ValidationError("nonpositive initial probability");
        mass += p;
    }
    if (std::abs(mass - 1.0) > kProbTol)
        throw ValidationError("initial probability mass sums to " + format_real(mass));
}

std::vector<std::vector<std::pair<StateId, ActionId>>> TabularMdp::reverse_map() const {
    std::vector<std::vector<std::pair<StateId, ActionId>>> rev(n_states_);
    for (StateId s = 0; s < n_states_; ++s)
        for (ActionId a = 0; a < n_actions_; ++a)
            for (const auto& t : transitions_[index(s, a)]) rev[t.next].emplace_back(s, a);
    return rev;
}

std::string to_string(AccessMode mode) {
    switch (mode) {
        case AccessMode::SettableDescriptive: return "settable_descriptive";
        case AccessMode::SettableGenerative: return "settable_generative";
        case AccessMode::ResettableGenerative: return "resettable_generative";
    }
    return "?";
}

AccessHandle::AccessHandle(const TabularMdp& mdp, AccessMode mode, std::uint64_t seed)
    : mdp_(&mdp), mode_(mode), seed_(seed), rng_(seed) {}

QueryResult AccessHandle::query_descriptive(StateId s, ActionId a) {
    if (mode_ != AccessMode::SettableDescriptive)
        throw WrongAccessMode("descriptive query on a " + to_string(mode_) + " handle");
    if (mdp_->is_terminal(s)) throw TerminalQuery("state " + std::to_string(s) + " is terminal");
    ++query_count_;
    QueryResult out;
    out.distribution = mdp_->transitions(s, a);
    return out;
}

QueryResult AccessHandle::query_generative(StateId s, ActionId a) {
    if (mode_ == AccessMode::ResettableGenerative && s != current_state_)
        throw WrongAccessMode("resettable handle queried at state " + std::to_string(s) +
                              " but current state is " + std::to_string(current_state_));
    if (mdp_->is_terminal(s)) throw TerminalQuery("state " + std::to_string(s) + " is terminal");
    ++query_count_;
    QueryResult out;
    out.sample = sample_transition(s, a);
    return out;
}

std::tuple<StateId, double, bool> AccessHandle::step(ActionId a) {
    if (mode_ != AccessMode::ResettableGenerative)
        throw WrongAccessMode("step on a " + to_string(mode_) + " handle");
    if (current_state_ < 0) throw EpisodeEnded("reset required before stepping");
    if (mdp_->is_terminal(current_state_))
        throw EpisodeEnded("episode ended at terminal state " + std::to_string(current_state_));
    ++query_count_;
    auto [next, reward] = sample_transition(current_state_, a);
    current_state_ = next;
    return {next, reward, mdp_->is_terminal(next)};
}

StateId AccessHandle::reset() {
    if (mode_ != AccessMode::ResettableGenerative)
        throw WrongAccessMode("reset on a " + to_string(mode_) + " handle");
    const auto& p0 = mdp_->initial_dist();
    double u = rng_.uniform();
    for (const auto& [s, p] : p0) {
        u -= p;
        if (u < 0.0) {
            current_state_ = s;
            return s;
        }
    }
    current_state_ = p0.back().first;
    return current_state_;
}

std::pair<StateId, double> AccessHandle::sample_transition(StateId s, ActionId a) {
    const auto& list = mdp_->transitions(s, a);
    double u = rng_.uniform();
    for (const auto& t : list) {
        u -= t.prob;
        if (u < 0.0) return {t.next, t.reward};
    }
    const auto& last = list.back();
    return {last.next, last.reward};
}

TabularMdp load_mdp(std::istream& in, std::vector<std::string>* warnings) {
    std::optional<TabularMdp> mdp;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw ParseError("line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string kind;
        if (!(fields >> kind)) continue;
        if (kind == "mdp") {
            if (mdp) fail("duplicate mdp header");
            int n_states, n_actions;
            double gamma;
            if (!(fields >> n_states >> n_actions >> gamma)) fail("malformed mdp header");
            mdp.emplace(n_states, n_actions, gamma);
        } else if (!mdp) {
            fail("expected `mdp <n_states> <n_actions> <gamma>` first");
        } else if (kind == "initial") {
            StateId s;
            double p;
            if (!(fields >> s >> p)) fail("malformed initial line");
            mdp->add_initial(s, p);
        } else if (kind == "terminal") {
            StateId s;
            if (!(fields >> s)) fail("malformed terminal line");
            mdp->set_terminal(s);
        } else if (kind == "t") {
            StateId s, next;
            ActionId a;
            double p, r;
            if (!(fields >> s >> a >> next >> p >> r)) fail("malformed transition line");
            try {
                mdp->add_transition(s, a, next, p, r);
            } catch (const ValidationError& e) {
                fail(e.what());
            }
        } else {
            fail("unknown directive `" + kind + "`");
        }
        std::string extra;
        if (fields >> extra) fail("trailing tokens after `" + kind + "` line");
    }
    if (!mdp) throw ParseError("empty input: no mdp header");
    mdp->validate(warnings);
    return std::move(*mdp);
}

TabularMdp load_mdp_string(const std::string& text, std::vector<std::string>* warnings) {
    std::istringstream in(text);
    return load_mdp(in, warnings);
}

TabularMdp load_mdp_file(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return load_mdp(in, warnings);
}

std::string emit_mdp(const TabularMdp& mdp, const std::string& header_comment) {
    std::ostringstream out;
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << "mdp " << mdp.n_states() << " " << mdp.n_actions() << " " << format_real(mdp.gamma())
        << "\n";
    for (const auto& [s, p] : mdp.initial_dist())
        out << "initial " << s << " " << format_real(p) << "\n";
    for (StateId s : mdp.terminals()) out << "terminal " << s << "\n";
    for (StateId s = 0; s < mdp.n_states(); ++s)
        for (ActionId a = 0; a < mdp.n_actions(); ++a)
            for (const auto& t : mdp.transitions(s, a))
                out << "t " << s << " " << a << " " << t.next << " " << format_real(t.prob) << " "
                    << format_real(t.reward) << "\n";
    return out.str();
}

TabularMdp make_chain(int n, double gamma) {
    if (n < 2) throw InvalidLayout("chain needs at least 2 states");
    TabularMdp mdp(n, 2, gamma);
    // Action 0 = left (stay put), action 1 = right (advance); reward 1 on
    // entering the final absorbing state.
    for (StateId s = 0; s + 1 < n; ++s) {
        mdp.add_transition(s, 0, s, 1.0, 0.0);
        mdp.add_transition(s, 1, s + 1, 1.0, s + 1 == n - 1 ? 1.0 : 0.0);
    }
    mdp.set_terminal(n - 1);
    mdp.add_initial(0, 1.0);
    mdp.validate();
    return mdp;
}

TabularMdp make_gridworld(int width, int height, const std::set<Cell>& walls, Cell goal,
                          double slip, double step_reward, double goal_reward, double gamma) {
    if (width <= 0 || height <= 0) throw InvalidLayout("grid dimensions must be positive");
    if (walls.count(goal)) throw InvalidLayout("goal cell is a wall");
    if (goal.x < 0 || goal.x >= width || goal.y < 0 || goal.y >= height)
        throw InvalidLayout("goal outside the grid");
    if (slip < 0.0 || slip >= 1.0) throw InvalidLayout("slip must lie in [0,1)");

    const int n = width * height;
    TabularMdp mdp(n, 4, gamma);
    auto id = [&](int x, int y) { return y * width + x; };
    auto blocked = [&](int x, int y) {
        return x < 0 || x >= width || y < 0 || y >= height || walls.count({x, y}) > 0;
    };
    const StateId goal_id = id(goal.x, goal.y);
    // dx/dy per action: 0 up, 1 right, 2 down, 3 left.
    const int dx[4] = {0, 1, 0, -1};
    const int dy[4] = {-1, 0, 1, 0};

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (blocked(x, y)) continue; // wall cells stay absorbing placeholders
            const StateId s = id(x, y);
            if (s == goal_id) continue;
            for (ActionId a = 0; a < 4; ++a) {
                auto land = [&](int dir) {
                    int nx = x + dx[dir], ny = y + dy[dir];
                    if (blocked(nx, ny)) return s; // bump: stay in place
                    return id(nx, ny);
                };
                auto reward_for = [&](StateId next) {
                    return next == goal_id ? goal_reward : step_reward;
                };
                const StateId main = land(a);
                if (slip == 0.0) {
                    mdp.add_transition(s, a, main, 1.0, reward_for(main));
                } else {
                    mdp.add_transition(s, a, main, 1.0 - slip, reward_for(main));
                    for (int perp : {(a + 1) % 4, (a + 3) % 4}) {
                        const StateId side = land(perp);
                        mdp.add_transition(s, a, side, slip / 2.0, reward_for(side));
                    }
                }
            }
        }
    }
    mdp.set_terminal(goal_id);
    for (const Cell& w : walls) mdp.set_terminal(id(w.x, w.y)); // unreachable, value 0
    StateId start = 0;
    while (start < n && mdp.is_terminal(start)) ++start;
    if (start == n) throw InvalidLayout("no non-terminal start cell");
    mdp.add_initial(start, 1.0);
    mdp.validate();
    return mdp;
}

TabularMdp make_ssp_racetrack_small() {
    // Track cells 0..3 with speeds {0,1,2}; the finish line sits at position 4.
    // Actions: 0 brake, 1 coast, 2 accelerate; speed changes fail with p=0.1
    // (speed stays). Overshooting the finish crashes back to the start at cost
    // -5; every other move costs -1. gamma = 1 (shortest-path objective).
    const int track = 4;
    const int speeds = 3;
    const int n = track * speeds + 1;
    const StateId goal = n - 1;
    TabularMdp mdp(n, 3, 1.0);
    auto id = [&](int pos, int speed) { return pos * speeds + speed; };

    for (int pos = 0; pos < track; ++pos) {
        for (int speed = 0; speed < speeds; ++speed) {
            const StateId s = id(pos, speed);
            for (ActionId a = 0; a < 3; ++a) {
                auto outcome = [&](int new_speed) -> std::pair<StateId, double> {
                    const int new_pos = pos + new_speed;
                    if (new_pos > track) return {id(0, 0), -5.0}; // crash
                    if (new_pos == track) return {goal, -1.0};
                    return {id(new_pos, new_speed), -1.0};
                };
                const int intended = std::clamp(speed + (a - 1), 0, speeds - 1);
                auto [next, reward] = outcome(intended);
                if (intended == speed) {
                    mdp.add_transition(s, a, next, 1.0, reward);
                } else {
                    mdp.add_transition(s, a, next, 0.9, reward);
                    auto [fail_next, fail_reward] = outcome(speed);
                    mdp.add_transition(s, a, fail_next, 0.1, fail_reward);
                }
            }
        }
    }
    mdp.set_terminal(goal);
    mdp.add_initial(id(0, 0), 1.0);
    mdp.validate();
    return mdp;
}

namespace {

TabularMdp make_split() {
    TabularMdp mdp(3, 1, 1.0);
    mdp.add_transition(0, 0, 1, 0.5, 1.0);
    mdp.add_transition(0, 0, 2, 0.5, 3.0);
    mdp.set_terminal(1);
    mdp.set_terminal(2);
    mdp.add_initial(0, 1.0);
    mdp.validate();
    return mdp;
}

} // namespace

TabularMdp make_builtin(const std::string& name) {
    if (name == "chain3") return make_chain(3, 0.9);
    if (name == "chain10") return make_chain(10, 0.9);
    if (name == "gridworld5") return make_gridworld(5, 5, {}, {4, 4}, 0.1, 0.0, 1.0, 0.95);
    if (name == "ssp_racetrack") return make_ssp_racetrack_small();
    if (name == "split") return make_split();
    throw InvalidLayout("unknown builtin environment `" + name + "`");
}

std::vector<std::string> builtin_names() {
    return {"chain3", "chain10", "gridworld5", "ssp_racetrack", "split"};
}

} // namespace frap

#include "frap/update.hpp"

#include <cmath>

namespace frap {

namespace {

// One shared arithmetic path so the special-case identities Replace = Step(1) and
// Average(n) = Step(1/n) hold bitwise.
double step_toward(double old_value, double target, double eta) {
    if (eta == 1.0) return target;
    return old_value + eta * (target - old_value);
}

} // namespace

double local_update(const LocalUpdateRule& rule, double old_value, double target, long n,
                    int depth) {
    switch (rule.kind) {
        case LocalUpdateRule::Kind::Replace:
            return step_toward(old_value, target, 1.0);
        case LocalUpdateRule::Kind::Average:
            return step_toward(old_value, target, 1.0 / static_cast<double>(n));
        case LocalUpdateRule::Kind::Step:
            return step_toward(old_value, target, rule.eta);
        case LocalUpdateRule::Kind::Eligibility: {
            const double eta = (1.0 - rule.lambda) * std::pow(rule.lambda, depth - 1);
            return step_toward(old_value, target, eta);
        }
    }
    return target;
}

std::vector<double> eligibility_weights(double lambda, int max_depth) {
    std::vector<double> weights(static_cast<std::size_t>(max_depth));
    for (int d = 1; d <= max_depth; ++d)
        weights[d - 1] = (1.0 - lambda) * std::pow(lambda, d - 1);
    if (max_depth > 0) weights.back() += std::pow(lambda, max_depth);
    return weights;
}

double decay_learning_rate(EtaSchedule schedule, double eta, double t0, long step) {
    switch (schedule) {
        case EtaSchedule::Constant: return eta;
        case EtaSchedule::Harmonic: return eta * t0 / (t0 + static_cast<double>(step));
    }
    return eta;
}

} // namespace frap

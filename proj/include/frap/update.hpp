#pragma once

#include <vector>

namespace frap {

/// How new back-up estimates are folded into a local aggregate.
struct LocalUpdateRule {
    enum class Kind { Replace, Average, Step, Eligibility };
    Kind kind = Kind::Replace;
    double eta = 0.1;    // Step
    double lambda = 0.9; // Eligibility

    static LocalUpdateRule replace() { return {Kind::Replace, 0.0, 0.0}; }
    static LocalUpdateRule average() { return {Kind::Average, 0.0, 0.0}; }
    static LocalUpdateRule step(double eta) { return {Kind::Step, eta, 0.0}; }
    static LocalUpdateRule eligibility(double lambda) { return {Kind::Eligibility, 0.0, lambda}; }
};

/// One tabular update. `n` counts this target (Average uses 1/n); `depth` is
/// the trace length behind an Eligibility target.
double local_update(const LocalUpdateRule& rule, double old_value, double target, long n,
                    int depth);

/// Forward-view eligibility weights for targets of depth 1..max_depth over a
/// trace truncated at max_depth: (1-lambda)*lambda^(d-1), with the residual
/// tail lambda^max_depth folded into the deepest weight so the mixture stays
/// normalized.
std::vector<double> eligibility_weights(double lambda, int max_depth);

enum class EtaSchedule { Constant, Harmonic };

/// Learning rate at `step` under the given decay scheme.
double decay_learning_rate(EtaSchedule schedule, double eta, double t0, long step);

} // namespace frap

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frap/engine.hpp"
#include "frap/oracle.hpp"

namespace frap {
namespace harness {

/// Deterministic greedy policy out of a finished run: argmax of Q / policy
/// logits, or a one-step lookahead on the true dynamics for V-only runs.
/// Ties break to the lowest action index.
std::vector<ActionId> greedy_policy(const RunResult& result, const TabularMdp& mdp);

/// V^pi(s0) of the run's greedy policy (exact policy evaluation); nullopt if
/// the policy diverges (improper on an SSP).
std::optional<double> greedy_policy_value(const RunResult& result, const TabularMdp& mdp,
                                          double tol = 1e-9);

/// What `verify` checks for one preset. Loaded from the manifest; the
/// compiled-in table mirrors the shipped share/verify_manifest.json.
struct VerifySpec {
    std::string check = "v_table"; // '+'-separated: v_table, v_root, greedy_policy,
                                   // recommend_root, policy_eval, solved_sound
    double threshold = 1e-3;
    int seeds = 5;
    long roots = 0; // 0: preset default
    double min_pass_fraction = 1.0;
};

VerifySpec default_verify_spec(const std::string& preset_name);
VerifySpec load_verify_spec(const std::string& manifest_path, const std::string& preset_name);

struct SeedOutcome {
    std::uint64_t seed = 0;
    bool pass = false;
    double err = 0.0;
    long queries = 0;
    std::string detail;
};

struct VerifyReport {
    bool pass = false;
    double pass_fraction = 0.0;
    std::vector<SeedOutcome> seeds;
};

/// Run the preset over `spec.seeds` seeds (in parallel) and check each run
/// against the brute-force oracle per the configured checks.
VerifyReport verify_preset(const TabularMdp& mdp, const std::string& preset_name,
                           const VerifySpec& spec, std::uint64_t base_seed = 1);

struct CompareRow {
    std::uint64_t seed = 0;
    double value_a = 0.0;
    double value_b = 0.0;
    long queries_a = 0;
    long queries_b = 0;
};

/// Paired runs of two presets with shared seeds: greedy-policy value at the
/// start state and real-environment query counts.
std::vector<CompareRow> compare_presets(const TabularMdp& mdp, const std::string& preset_a,
                                        const std::string& preset_b, int seeds, long roots,
                                        std::uint64_t base_seed = 1);

int run_cli(int argc, const char* const* argv);

} // namespace harness
} // namespace frap

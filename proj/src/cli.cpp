#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "frap/harness.hpp"
#include "frap/metrics.hpp"
#include "json.hpp"

namespace frap {
namespace harness {

namespace {

TabularMdp resolve_env(const std::string& spec) {
    if (std::filesystem::exists(spec)) return load_mdp_file(spec);
    std::string name = spec;
    const auto dot = name.rfind(".mdp");
    if (dot != std::string::npos && dot == name.size() - 4) name.erase(dot);
    return make_builtin(name);
}

std::uint64_t effective_seed(std::uint64_t cli_seed) {
    if (const char* env = std::getenv("FRAP_SEED")) return std::strtoull(env, nullptr, 10);
    return cli_seed;
}

void write_or_print(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << content;
}

int cmd_run(const std::string& env, const std::string& preset_name,
            const std::string& config_path, long roots, std::uint64_t seed,
            const std::string& out_prefix, bool timings) {
    const TabularMdp mdp = resolve_env(env);
    AlgorithmConfig cfg =
        config_path.empty() ? preset(preset_name) : parse_config_file(config_path);
    AccessHandle handle(mdp, cfg.access_required, seed * 7919 + 13);
    const RunResult result = run(cfg, handle, roots, seed, timings);

    const std::string csv = emit_metrics(result.roots, MetricsFormat::Csv);
    const std::string summary = summary_json(result, timings);
    if (out_prefix.empty()) {
        std::cout << summary << "\n";
    } else {
        write_or_print(out_prefix + ".metrics.csv", csv);
        write_or_print(out_prefix + ".summary.json", summary);
        std::cout << "wrote " << out_prefix << ".metrics.csv and " << out_prefix
                  << ".summary.json\n";
    }
    return 0;
}

int cmd_oracle(const std::string& env, double tol, const std::string& out_path) {
    const TabularMdp mdp = resolve_env(env);
    const auto truth = oracle::value_iteration(mdp, tol);
    nlohmann::json j;
    j["v_star"] = truth.v_star;
    auto q_rows = nlohmann::json::array();
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        auto row = nlohmann::json::array();
        for (ActionId a = 0; a < mdp.n_actions(); ++a)
            row.push_back(truth.q_at(s, a, mdp.n_actions()));
        q_rows.push_back(row);
    }
    j["q_star"] = q_rows;
    j["optimal_policy"] = truth.optimal_actions;
    j["iterations"] = truth.iterations;
    j["residual"] = truth.residual;
    write_or_print(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_verify(const std::string& env, const std::string& preset_name, double tol, int seeds,
               long roots, const std::string& manifest) {
    const TabularMdp mdp = resolve_env(env);
    VerifySpec spec = manifest.empty() ? default_verify_spec(preset_name)
                                       : load_verify_spec(manifest, preset_name);
    if (tol > 0.0) spec.threshold = tol;
    if (seeds > 0) spec.seeds = seeds;
    if (roots > 0) spec.roots = roots;
    const auto report = verify_preset(mdp, preset_name, spec);
    for (const auto& s : report.seeds)
        std::cout << "seed " << s.seed << ": " << (s.pass ? "pass" : "FAIL") << " " << s.detail
                  << "(queries " << s.queries << ")\n";
    std::cout << preset_name << " on " << env << ": " << (report.pass ? "PASS" : "FAIL") << " ("
              << report.pass_fraction * 100.0 << "% of " << report.seeds.size() << " seeds, check "
              << spec.check << ", threshold " << spec.threshold << ")\n";
    return report.pass ? 0 : 1;
}

int cmd_compare(const std::string& env, const std::vector<std::string>& presets, int seeds,
                long roots) {
    if (presets.size() != 2) throw ConfigError("compare needs exactly two --preset options");
    const TabularMdp mdp = resolve_env(env);
    const auto rows = compare_presets(mdp, presets[0], presets[1], seeds, roots);
    std::cout << "seed," << presets[0] << "_value," << presets[1] << "_value," << presets[0]
              << "_queries," << presets[1] << "_queries\n";
    double sum_a = 0.0, sum_b = 0.0;
    long q_a = 0, q_b = 0;
    for (const auto& r : rows) {
        std::cout << r.seed << "," << r.value_a << "," << r.value_b << "," << r.queries_a << ","
                  << r.queries_b << "\n";
        sum_a += r.value_a;
        sum_b += r.value_b;
        q_a += r.queries_a;
        q_b += r.queries_b;
    }
    if (!rows.empty()) {
        const double n = static_cast<double>(rows.size());
        std::cout << "mean," << sum_a / n << "," << sum_b / n << "," << q_a / rows.size() << ","
                  << q_b / rows.size() << "\n";
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Composable tabular MDP planning and reinforcement-learning engine"};
    app.require_subcommand(1);

    std::string env, preset_name, config_path, out, manifest;
    long roots = 0;
    std::uint64_t seed = 1;
    double tol = 0.0;
    int seeds = 0;
    bool timings = false;
    std::vector<std::string> compare_presets_opt;

    auto* run_cmd = app.add_subcommand("run", "Run a preset or config file on an environment");
    run_cmd->add_option("--env", env, "Environment file or builtin name")->required();
    run_cmd->add_option("--preset", preset_name, "Preset name");
    run_cmd->add_option("--config", config_path, "Flat key=value config file");
    run_cmd->add_option("--roots", roots, "Root budget (0: preset default)");
    run_cmd->add_option("--seed", seed, "Run seed (FRAP_SEED overrides)");
    run_cmd->add_option("--out", out, "Output prefix for metrics CSV + summary JSON");
    run_cmd->add_flag("--timings", timings, "Record wall-clock times (non-reproducible output)");

    auto* oracle_cmd = app.add_subcommand("oracle", "Exact value iteration reference");
    oracle_cmd->add_option("--env", env, "Environment file or builtin name")->required();
    double oracle_tol = 1e-9;
    oracle_cmd->add_option("--tol", oracle_tol, "Sup-norm residual tolerance");
    oracle_cmd->add_option("--out", out, "Output path (default stdout)");

    auto* verify_cmd = app.add_subcommand("verify", "Run a preset and check it against the oracle");
    verify_cmd->add_option("--env", env, "Environment file or builtin name")->required();
    verify_cmd->add_option("--preset", preset_name, "Preset name")->required();
    verify_cmd->add_option("--tol", tol, "Override the pass threshold");
    verify_cmd->add_option("--seeds", seeds, "Number of seeds");
    verify_cmd->add_option("--roots", roots, "Root budget per run");
    verify_cmd->add_option("--manifest", manifest, "Verify manifest JSON");

    int compare_seeds = 5;
    auto* compare_cmd = app.add_subcommand("compare", "Paired comparison of two presets");
    compare_cmd->add_option("--env", env, "Environment file or builtin name")->required();
    compare_cmd->add_option("--preset", compare_presets_opt, "Two preset names");
    compare_cmd->add_option("--seeds", compare_seeds, "Number of seeds");
    compare_cmd->add_option("--roots", roots, "Root budget per run");

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) {
            if (preset_name.empty() == config_path.empty())
                throw ConfigError("run needs exactly one of --preset / --config");
            return cmd_run(env, preset_name, config_path, roots, effective_seed(seed), out,
                           timings);
        }
        if (oracle_cmd->parsed()) return cmd_oracle(env, oracle_tol, out);
        if (verify_cmd->parsed())
            return cmd_verify(env, preset_name, tol, seeds, roots, manifest);
        if (compare_cmd->parsed()) return cmd_compare(env, compare_presets_opt, compare_seeds, roots);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace harness
} // namespace frap

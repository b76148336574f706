#include "frap/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace frap {

namespace {

std::string real17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string emit_metrics(const std::vector<RootRecord>& rows, MetricsFormat format) {
    if (format == MetricsFormat::Csv) {
        std::ostringstream out;
        out << "iter,root,v_root,residual,return,queries,wall_ms\n";
        for (const auto& r : rows)
            out << r.iter << ',' << r.root << ',' << real17(r.v_root) << ','
                << real17(r.residual) << ',' << real17(r.episode_return) << ',' << r.query_count
                << ',' << real17(r.wall_ms) << "\n";
        return out.str();
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["iter"] = r.iter;
        row["root"] = r.root;
        row["v_root"] = r.v_root;
        row["residual"] = r.residual;
        if (std::isnan(r.episode_return))
            row["return"] = nullptr;
        else
            row["return"] = r.episode_return;
        row["queries"] = r.query_count;
        row["wall_ms"] = r.wall_ms;
        arr.push_back(row);
    }
    return arr.dump(2);
}

std::vector<RootRecord> parse_metrics_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "iter,root,v_root,residual,return,queries,wall_ms")
        throw ParseError("bad metrics CSV header");
    std::vector<RootRecord> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        RootRecord r;
        std::istringstream fields(line);
        std::string field;
        auto next_field = [&] {
            if (!std::getline(fields, field, ','))
                throw ParseError("metrics CSV line " + std::to_string(line_no) +
                                 ": missing field");
            return field;
        };
        r.iter = std::stol(next_field());
        r.root = std::stoi(next_field());
        r.v_root = std::stod(next_field());
        r.residual = std::stod(next_field());
        r.episode_return = std::stod(next_field());
        r.query_count = std::stol(next_field());
        r.wall_ms = std::stod(next_field());
        rows.push_back(r);
    }
    return rows;
}

std::string summary_json(const RunResult& result, bool include_wall_time) {
    nlohmann::json j;
    j["seed"] = result.seed;
    j["queries"] = result.query_count;
    j["model_queries"] = result.model_query_count;
    j["outer_iterations"] = result.outer_iterations;
    j["converged"] = result.converged;
    j["solved_root"] = result.solved_root;
    if (include_wall_time) j["wall_ms"] = result.wall_ms;
    j["config"] = result.config_echo;
    j["solution"] = nlohmann::json::parse(result.global.snapshot_json());
    return j.dump(2);
}

} // namespace frap

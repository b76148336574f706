#pragma once

#include <string>
#include <vector>

#include "frap/engine.hpp"

namespace frap {

enum class MetricsFormat { Csv, Json };

/// Header exactly `iter,root,v_root,residual,return,queries,wall_ms`; reals
/// printed with 17 significant digits so identical runs emit identical bytes.
std::string emit_metrics(const std::vector<RootRecord>& rows, MetricsFormat format);

/// Inverse of the CSV emitter (round-trip property + external consumers).
std::vector<RootRecord> parse_metrics_csv(const std::string& csv);

/// Run summary as JSON: seed, config echo, query counts, convergence flags
/// and the final solution snapshot.
std::string summary_json(const RunResult& result, bool include_wall_time);

} // namespace frap

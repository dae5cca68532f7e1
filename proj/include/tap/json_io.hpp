#pragma once

#include <string>

#include <json.hpp>

#include "tap/baselines.hpp"
#include "tap/influence.hpp"
#include "tap/stab.hpp"

namespace tap {

// Influence spec document:
//   {"model": "ic"|"lt", "ip_max": x | "ip": [...], "param_seed": s,
//    "ext": {"kind": "none"|"bernoulli", "ep_max": y | "ep": [...]}}
// Uniform parameters regenerate from (graph, param_seed); explicit arrays
// are stored verbatim, indexed by edge id / node id. Generic samplers are
// not serializable.
nlohmann::json influence_spec_to_json(const InfluenceSpec &spec);
InfluenceSpec influence_spec_from_json(const nlohmann::json &doc, const DirectedGraph &g);

nlohmann::json stab_config_to_json(const StabConfig &cfg);
StabConfig stab_config_from_json(const nlohmann::json &doc);

// {"seeds": [...], "sigma_hat": x, "offset_O": o, "trace": [...],
//  "stopped_by": ..., "config_echo": ...}
nlohmann::json solution_to_json(const TapSolution &sol, const nlohmann::json &config_echo);

nlohmann::json eval_report_to_json(const EvalReport &report);

// Fixed, versioned CSV schema for figure scripts.
inline constexpr int kResultsCsvVersion = 1;
std::string results_csv_header();
std::string results_csv_row(int schema_version, double threshold, const std::string &algorithm,
                            double alpha, const TapSolution &sol, const EvalReport &eval,
                            double runtime_ms, std::uint64_t master_seed);

inline constexpr int kSweepCsvVersion = 1;
std::string sweep_csv_header();
std::string sweep_csv_row(int schema_version, double ep_max, const TapSolution &sol,
                          const EvalReport &eval, double external_fraction, double runtime_ms,
                          std::uint64_t master_seed);

} // namespace tap

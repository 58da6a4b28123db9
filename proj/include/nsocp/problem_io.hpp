#pragma once

#include <string>

#include "json.hpp"
#include "nsocp/cq.hpp"
#include "nsocp/model.hpp"
#include "nsocp/solvers.hpp"

namespace nsocp {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

// Problem document: {name, n, objective, constraints: [{dim, components}],
// points_of_interest, expected}. Errors carry line/column in detail.
ProblemSpec problem_from_json(const json& doc);
ProblemSpec load_problem_text(const std::string& text);
ProblemSpec load_problem_file(const std::string& path);
json problem_to_json(const ProblemSpec& p);

// Compact JSON with every double written as %.17g.
std::string dump_json(const json& j);

json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j);
Vec parse_csv_vector(const std::string& csv);

json to_json(const KktResidual& r);
json to_json(const IterateLog& it);
json to_json(const CqVerdict& v);
json to_json(const SolverConfig& cfg);

// key=value override on a solver config; throws InvalidProblem on bad keys
void apply_override(SolverConfig& cfg, const std::string& assignment);

}  // namespace nsocp
